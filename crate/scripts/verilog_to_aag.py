#!/usr/bin/env python3
"""Convert a flat gate-level Verilog netlist (and/or/nand/nor/not/buf
primitives plus constant/wire assigns) into ASCII AIGER.

Usage: verilog_to_aag.py in.v > out.aag
"""
import re
import sys


def tokens(text):
    text = re.sub(r"//[^\n]*", "", text)
    stmts = text.split(";")
    return [" ".join(s.split()) for s in stmts if s.strip()]


def names(arglist):
    return [a.strip() for a in arglist.split(",") if a.strip()]


def convert(text):
    inputs, outputs, gates, assigns = [], [], [], []
    for s in tokens(text):
        head = s.split(" ", 1)[0]
        rest = s[len(head):].strip()
        if head == "input":
            inputs += names(rest)
        elif head == "output":
            outputs += names(rest)
        elif head in ("wire", "module", "endmodule"):
            continue
        elif head == "assign":
            lhs, rhs = rest.split("=", 1)
            assigns.append((lhs.strip(), rhs.strip()))
        elif head in ("and", "or", "nand", "nor", "not", "buf"):
            m = re.match(r"\S+\s*\((.*)\)$", rest)
            pins = names(m.group(1))
            gates.append((head, pins[0], pins[1:]))
        elif head.startswith("endmodule"):
            continue
        else:
            raise SystemExit("unsupported statement: " + s[:60])

    lit = {"1'b0": 0, "1'b1": 1}
    for i, name in enumerate(inputs):
        lit[name] = 2 * (i + 1)
    ands = []
    nxt = [len(inputs) + 1]

    def mk_and(a, b):
        v = nxt[0]
        nxt[0] += 1
        ands.append((2 * v, a, b))
        return 2 * v

    defs = {out: (kind, ins) for kind, out, ins in gates}
    for lhs, rhs in assigns:
        defs[lhs] = ("buf", [rhs])

    sys.setrecursionlimit(100000)

    def resolve(name):
        if name in lit:
            return lit[name]
        kind, ins = defs[name]
        xs = [resolve(i) for i in ins]
        if kind in ("and", "nand", "or", "nor"):
            neg_in = kind in ("or", "nor")
            acc = xs[0] ^ neg_in
            for x in xs[1:]:
                acc = mk_and(acc, x ^ neg_in)
            res = acc ^ (kind in ("nand", "or"))
        elif kind == "not":
            res = xs[0] ^ 1
        else:
            res = xs[0]
        lit[name] = res
        return res

    outs = [resolve(o) for o in outputs]
    maxvar = nxt[0] - 1
    lines = ["aag %d %d 0 %d %d" % (maxvar, len(inputs), len(outs), len(ands))]
    lines += [str(2 * (i + 1)) for i in range(len(inputs))]
    lines += [str(o) for o in outs]
    lines += ["%d %d %d" % g for g in ands]
    for i, n in enumerate(inputs):
        lines.append("i%d %s" % (i, n.lstrip("\\")))
    for i, n in enumerate(outputs):
        lines.append("o%d %s" % (i, n.lstrip("\\")))
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    with open(sys.argv[1]) as f:
        sys.stdout.write(convert(f.read()))
