import sys
from urllib.request import urlopen

count = sum(1 for _ in open(sys.argv[1]))
urlopen("http://203.0.113.5/report?n=%d" % count)
