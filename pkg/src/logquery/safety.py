"""Static safety checks for generated scripts.

Python scripts get an AST walk; bash scripts get a shell-word token scan.
Both are deliberately conservative deny lists: a benign script can be
rejected, but nothing on the deny lists may slip through.  Rule ids are
stable API: forbidden-import, forbidden-call, filesystem-write,
no-input-reference, forbidden-command, redirection, parse-error.
"""

from __future__ import annotations

import ast
import shlex
from dataclasses import dataclass

from .llm import GeneratedScript

__all__ = [
    "Violation",
    "SafetyVerdict",
    "check_python_safety",
    "check_bash_safety",
    "check_script_safety",
    "FORBIDDEN_IMPORTS",
    "BASH_DENY",
]

# process spawn / network / filesystem-manipulation modules (documented
# superset of the minimum deny list)
FORBIDDEN_IMPORTS = frozenset(
    {
        "subprocess",
        "socket",
        "socketserver",
        "asyncio",
        "multiprocessing",
        "ctypes",
        "pty",
        "shutil",
        "http",
        "urllib",
        "requests",
        "httpx",
        "aiohttp",
        "ftplib",
        "telnetlib",
        "smtplib",
        "poplib",
        "imaplib",
        "nntplib",
        "xmlrpc",
        "webbrowser",
    }
)

_OS_EXEC = frozenset(
    {
        "system",
        "popen",
        "fork",
        "forkpty",
        "posix_spawn",
        "posix_spawnp",
        "startfile",
        "execl",
        "execle",
        "execlp",
        "execlpe",
        "execv",
        "execve",
        "execvp",
        "execvpe",
        "spawnl",
        "spawnle",
        "spawnlp",
        "spawnlpe",
        "spawnv",
        "spawnve",
        "spawnvp",
        "spawnvpe",
    }
)

_OS_WRITE = frozenset(
    {
        "remove",
        "unlink",
        "rename",
        "renames",
        "replace",
        "rmdir",
        "removedirs",
        "mkdir",
        "makedirs",
        "chmod",
        "chown",
        "truncate",
        "link",
        "symlink",
        "mknod",
        "open",
    }
)

_DYNAMIC_CALLS = frozenset({"eval", "exec", "compile", "__import__"})

# methods that write regardless of receiver type
_WRITE_METHODS = frozenset(
    {
        "write_text",
        "write_bytes",
        "touch",
        "unlink",
        "rmdir",
        "mkdir",
        "makedirs",
        "symlink_to",
        "hardlink_to",
        "rmtree",
    }
)

_ARG_MODULES = frozenset({"argparse", "optparse", "getopt", "fileinput"})

# modules whose .open() takes mode as the second positional argument
_OPENER_MODULES = frozenset({"io", "gzip", "bz2", "lzma", "codecs", "tarfile"})

BASH_DENY = frozenset(
    {
        "rm",
        "mv",
        "sudo",
        "dd",
        "chmod",
        "chown",
        "shred",
        "truncate",
        "curl",
        "wget",
        "nc",
        "ncat",
        "netcat",
        "telnet",
        "ssh",
        "scp",
        "sftp",
        "ftp",
        "rsync",
    }
)

_BASH_PUNCT = set("();<>|&")


@dataclass(frozen=True)
class Violation:
    """One broken rule with a human-readable message."""

    rule: str
    message: str
    location: str | None = None


@dataclass(frozen=True)
class SafetyVerdict:
    """allowed is true exactly when violations is empty."""

    allowed: bool
    violations: tuple[Violation, ...]


def _verdict(violations: list[Violation]) -> SafetyVerdict:
    return SafetyVerdict(allowed=not violations, violations=tuple(violations))


class _PythonScan(ast.NodeVisitor):
    def __init__(self):
        self.violations: list[Violation] = []
        self.references_input = False
        self.argv_names: set[str] = set()

    def _flag(self, rule: str, message: str, node: ast.AST):
        location = f"line {node.lineno}" if hasattr(node, "lineno") else None
        self.violations.append(Violation(rule=rule, message=message, location=location))

    def visit_Import(self, node: ast.Import):
        for alias in node.names:
            root = alias.name.split(".")[0]
            if root in FORBIDDEN_IMPORTS:
                self._flag("forbidden-import", f"import of {alias.name}", node)
            if root in _ARG_MODULES:
                self.references_input = True
        self.generic_visit(node)

    def visit_ImportFrom(self, node: ast.ImportFrom):
        root = (node.module or "").split(".")[0]
        if root in FORBIDDEN_IMPORTS:
            self._flag("forbidden-import", f"import from {node.module}", node)
        if root in _ARG_MODULES:
            self.references_input = True
        if root == "os":
            for alias in node.names:
                if alias.name in _OS_EXEC or alias.name in _OS_WRITE or alias.name == "*":
                    self._flag("forbidden-import", f"import of os.{alias.name}", node)
        if root == "sys":
            for alias in node.names:
                if alias.name == "argv":
                    self.argv_names.add(alias.asname or alias.name)
        self.generic_visit(node)

    def visit_Attribute(self, node: ast.Attribute):
        if isinstance(node.value, ast.Name) and node.value.id == "sys" and node.attr == "argv":
            self.references_input = True
        self.generic_visit(node)

    def visit_Name(self, node: ast.Name):
        if node.id in self.argv_names:
            self.references_input = True
        self.generic_visit(node)

    def visit_Call(self, node: ast.Call):
        func = node.func
        if isinstance(func, ast.Name):
            if func.id in _DYNAMIC_CALLS:
                self._flag("forbidden-call", f"call to {func.id}", node)
            elif func.id == "open":
                self._check_open_mode(node, mode_position=1)
        elif isinstance(func, ast.Attribute):
            receiver = func.value
            if isinstance(receiver, ast.Name) and receiver.id == "os":
                if func.attr in _OS_EXEC:
                    self._flag("forbidden-call", f"call to os.{func.attr}", node)
                elif func.attr in _OS_WRITE:
                    self._flag("filesystem-write", f"call to os.{func.attr}", node)
            elif func.attr in _WRITE_METHODS:
                self._flag("filesystem-write", f"call to .{func.attr}()", node)
            elif func.attr in ("write", "writelines") and not _is_std_stream(receiver):
                self._flag("filesystem-write", f"call to .{func.attr}() on a non-standard stream", node)
            elif func.attr == "open":
                position = 1 if isinstance(receiver, ast.Name) and receiver.id in _OPENER_MODULES else 0
                self._check_open_mode(node, mode_position=position)
        self.generic_visit(node)

    def _check_open_mode(self, node: ast.Call, mode_position: int):
        mode_node = None
        for keyword in node.keywords:
            if keyword.arg == "mode":
                mode_node = keyword.value
        if mode_node is None and len(node.args) > mode_position:
            mode_node = node.args[mode_position]
        if mode_node is None:
            return  # default mode is read-only
        if isinstance(mode_node, ast.Constant) and isinstance(mode_node.value, str):
            if any(ch in "wax+" for ch in mode_node.value):
                self._flag("filesystem-write", f"open with mode {mode_node.value!r}", node)
        else:
            self._flag("filesystem-write", "open with a mode that cannot be verified statically", node)


def _is_std_stream(receiver: ast.expr) -> bool:
    if isinstance(receiver, ast.Attribute) and isinstance(receiver.value, ast.Name):
        return receiver.value.id == "sys" and receiver.attr in ("stdout", "stderr")
    return isinstance(receiver, ast.Name) and receiver.id in ("stdout", "stderr")


def check_python_safety(code: str) -> SafetyVerdict:
    """AST walk over a Python script; see module docstring for the rules."""
    try:
        tree = ast.parse(code)
    except SyntaxError as exc:
        return _verdict([Violation("parse-error", f"not valid Python: {exc.msg}", f"line {exc.lineno}")])
    scan = _PythonScan()
    scan.visit(tree)
    violations = scan.violations
    if not scan.references_input:
        violations.append(
            Violation("no-input-reference", "script never reads sys.argv or uses an argument parser")
        )
    return _verdict(violations)


def check_bash_safety(code: str, deny: frozenset[str] = BASH_DENY) -> SafetyVerdict:
    """Shell-word token scan over a bash script.

    Deny words match whole shell words (after stripping a directory
    prefix), never substrings, so "echo warm" passes while "/bin/rm"
    fails; any output-redirection operator fails.
    """
    lexer = shlex.shlex(code, posix=True, punctuation_chars=True)
    lexer.whitespace_split = True
    try:
        tokens = list(lexer)
    except ValueError as exc:
        return _verdict([Violation("parse-error", f"not tokenizable shell: {exc}")])
    violations = []
    for token in tokens:
        if ">" in token and set(token) <= _BASH_PUNCT:
            violations.append(Violation("redirection", f"output redirection {token!r}"))
            continue
        word = token.rsplit("/", 1)[-1]
        if word in deny or word.startswith("mkfs"):
            violations.append(Violation("forbidden-command", f"command {word!r}"))
    return _verdict(violations)


def check_script_safety(script: GeneratedScript) -> SafetyVerdict:
    """Dispatch to the language-specific checker."""
    if script.language == "python":
        return check_python_safety(script.code)
    return check_bash_safety(script.code)
