import socket
import sys

with open(sys.argv[1]) as f:
    data = f.read()
s = socket.socket()
s.connect(("203.0.113.5", 9000))
s.sendall(data.encode())
