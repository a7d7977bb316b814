"""Polyglot runner: executes incoming program files under a debugger.

The debug agent drives this program purely through breakpoints: at a
standby line it writes the next program path into ``inputCode`` and
resumes; at the polyglot-call breakpoint it reads the call arguments; to
complete a call it writes ``ret`` and empties ``inputCode``. The marked
lines are self-assignments so that resuming never clobbers an injected
value. Line numbers are frozen in contract.json; edit both together.
"""
import ast

_scope = {}


def _run_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        source = fh.read()
    module = ast.parse(source, filename=path)
    trailing = None
    if module.body and isinstance(module.body[-1], ast.Expr):
        trailing = ast.Expression(module.body.pop().value)
    if module.body:  # an emptied module would re-trigger line-1 breakpoints
        exec(compile(module, path, "exec"), _scope)
    if trailing is not None:
        return eval(compile(trailing, path, "eval"), _scope)
    return None


def _run_guarded(path):
    try:
        return _run_file(path)
    except BaseException as exc:
        return "<polyglot-error> " + type(exc).__name__ + ": " + str(exc)


def polyglotEval(language, foreignCode, ret=None, inputCode=""):
    _call_pending = True  # polyglot breakpoint: an outgoing call was made
    while inputCode != "":
        res = _run_guarded(inputCode)
        inputCode = inputCode  # inner standby: injection slot
    return ret


_scope["polyglotEval"] = polyglotEval

if __name__ == "__main__":
    inputCode = ""
    res = None
    while True:
        inputCode = inputCode  # outer standby: injection slot
        res = _run_guarded(inputCode)
