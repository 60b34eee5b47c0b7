#!/usr/bin/env python3
"""Assembles tests/corpus/combined.json from the smaller corpora.

Reference MathML is left empty; fill it with
    texmathc corpus --update-refs tests/corpus/combined.json
and review the diff before committing.
"""
import json
import pathlib
import subprocess
import sys

TARGET = 423
root = pathlib.Path(__file__).resolve().parents[2]
corpus = root / "tests" / "corpus"
texmathc = sys.argv[1] if len(sys.argv) > 1 else str(root / "build" / "tools" / "texmathc")

practical = [
    r"E = mc^2", r"a^2 + b^2 = c^2", r"e^{i\pi} + 1 = 0", r"\int_0^\infty e^{-x^2} dx = \frac{\sqrt{\pi}}{2}",
    r"\sum_{n=1}^\infty \frac{1}{n^2} = \frac{\pi^2}{6}", r"\lim_{x \to 0} \frac{\sin x}{x} = 1",
    r"f'(x) = \lim_{h \to 0} \frac{f(x+h) - f(x)}{h}", r"\nabla \cdot \mathbf{E} = \frac{\rho}{\varepsilon_0}",
    r"\nabla \times \mathbf{B} = \mu_0 \mathbf{J}", r"\binom{n}{k} = \frac{n!}{k!(n-k)!}",
    r"\det(A) = \sum_{\sigma} \operatorname{sgn}(\sigma) \prod_i a_{i,\sigma(i)}", r"P(A \mid B) = \frac{P(B \mid A) P(A)}{P(B)}",
    r"\hat{H} \psi = E \psi", r"i \hbar \frac{\partial}{\partial t} \Psi = \hat{H} \Psi", r"\vec{F} = m \vec{a}",
    r"x_{1,2} = \frac{-b \pm \sqrt{b^2-4ac}}{2a}", r"\cos^2 \theta + \sin^2 \theta = 1", r"\log_b x = \frac{\ln x}{\ln b}",
    r"\left( \sum_{k=1}^n a_k b_k \right)^2 \le \left( \sum_{k=1}^n a_k^2 \right) \left( \sum_{k=1}^n b_k^2 \right)",
    r"\mathbb{R}^n", r"\forall \epsilon > 0 \, \exists \delta > 0", r"A \subseteq B \cup C", r"\overline{z} = a - bi",
    r"\| x \|_2 = \sqrt{\sum_i x_i^2}", r"\langle u, v \rangle", r"\lfloor x \rfloor \le x < \lfloor x \rfloor + 1",
    r"\begin{bmatrix} 1 & 0 \\ 0 & 1 \end{bmatrix}", r"\begin{cases} x & x \ge 0 \\ -x & x < 0 \end{cases}",
    r"f(x) = \begin{cases} 1 & \text{if } x > 0 \\ 0 & \text{otherwise} \end{cases}", r"\sqrt[n]{x^m} = x^{m/n}",
    r"\frac{d}{dx} e^x = e^x", r"\oint_C \mathbf{F} \cdot d\mathbf{r}", r"\iint_D f(x,y) \, dx \, dy",
    r"\mathcal{O}(n \log n)", r"\tilde{x}", r"\bar{x} = \frac{1}{n} \sum_{i=1}^n x_i", r"\sigma^2 = E[X^2] - E[X]^2",
    r"a \equiv b \ (\mathrm{mod}\ n)", r"\gcd(a, b)", r"\max_{x \in S} f(x)", r"\underbrace{a + b}_{n}", r"\overbrace{x+y}^{k}",
    r"\dot{x} = v", r"\ddot{x} = -\omega^2 x", r"\alpha \beta \gamma \delta", r"\Gamma(n) = (n-1)!",
    r"\zeta(s) = \sum_{n=1}^\infty n^{-s}", r"\prod_{p} \frac{1}{1-p^{-s}}", r"x \in [0, 1)", r"\{ x \mid x > 0 \}",
    r"\mathrm{d}x", r"\boxed{x = 1}", r"\cancel{x}", r"a \cdot b \times c", r"\frac{1}{1+\frac{1}{x}}",
    r"{n \choose k}", r"a \over b + c", r"\displaystyle \sum_i x_i", r"x \to \infty", r"\exp(x)",
]

intent = [
    r"\intent{(x,y)}{intent='open-interval($x,$y)'}", r"\intent{[a,b]}{intent='closed-interval($a,$b)'}",
    r"\intent{z}{intent='imaginary-part'}", r"\intent{x^2}{intent='square($x)'}",
    r"\intent{\frac{a}{b}}{intent='divide($a,$b)'}", r"\intent{(a,b)}{intent='open-interval($x,$y)', arg='a=x,b=y'}",
    r"\intent{x+x}{intent='double($y)', arg='x=y'}", r"\intent{f'}{intent='derivative($f)'}",
    r"a + \intent{x^2}{intent='square($x)'}", r"\intent{\intent{x}{intent='inner($x)'} + x}{intent='outer($x)'}",
    r"\intent{n!}{intent='factorial($n)'}", r"\intent{|x|}{intent='absolute-value($x)'}",
    r"\intent{\binom{n}{k}}{intent='binomial($n,$k)'}", r"\intent{x}{intent='transpose@postfix($x)'}",
    r"\intent{A}{intent=':matrix'}",
]

errors = [
    (r"\badcmd", "E_UNKNOWN_COMMAND"), (r"x + \foo y", "E_UNKNOWN_COMMAND"), (r"{x", "E_UNBALANCED_BRACE"),
    (r"x}", "E_UNBALANCED_BRACE"), (r"\frac{a}{b", "E_UNBALANCED_BRACE"), (r"x^2^3", "E_DOUBLE_SCRIPT"),
    (r"x_1_2", "E_DOUBLE_SCRIPT"), (r"\frac{a}", "E_EMPTY_ARG"), (r"\sqrt", "E_EMPTY_ARG"), (r"x^", "E_EMPTY_ARG"),
    (r"a \over b \over c", "E_DOUBLE_INFIX"), (r"\begin{foo} x \end{foo}", "E_BAD_ENV"),
    (r"\begin{pmatrix} x \end{bmatrix}", "E_BAD_ENV"), (r"\left( x", "E_BAD_DELIM"), (r"\left x \right)", "E_BAD_DELIM"),
    (r"x \right)", "E_BAD_DELIM"), (r"a & b", "E_MISPLACED"), (r"x # y", "E_BAD_CHAR"), (r"x % y", "E_BAD_CHAR"),
    (r"\text{a", "E_UNBALANCED_BRACE"), (r"\ce{H2O}", "E_UNKNOWN_COMMAND"), (r"\intent{x}{intent='f('}", "E_INTENT_SYNTAX"),
    (r"\intent{(a,b)}{intent='f($x)'}", "E_INTENT_UNBOUND_REF"), (r"\intent{x+x}{intent='double($x)'}", "E_INTENT_AMBIGUOUS_REF"),
    ("{" * 200 + "x" + "}" * 200, "E_TOO_DEEP"), (r"x \\ y", "E_MISPLACED"), (r"\end{matrix}", "E_BAD_ENV"),
]
chem_errors = [(r"\ce{H$}", "E_CHEM_SYNTAX"), (r"\ce H2O", "E_CHEM_SYNTAX"), (r"\ce{(H2O}", "E_CHEM_SYNTAX")]


def case(cid, tex, expect, **opts):
    c = {"id": cid, "input": tex, "expect": expect}
    if opts:
        c["options"] = opts
    return c


cases = []
cases += json.loads((corpus / "figure2.json").read_text())
cases += json.loads((corpus / "mhchem.json").read_text())
cases += [case(f"practical-{i:03d}", t, {"mathml": ""}) for i, t in enumerate(practical)]
cases += [case(f"intent-{i:03d}", t, {"mathml": ""}) for i, t in enumerate(intent)]
cases += [case(f"error-{i:03d}", t, {"error_code": c}) for i, (t, c) in enumerate(errors)]
cases += [case(f"error-chem-{i:03d}", t, {"error_code": c}, chem=True) for i, (t, c) in enumerate(chem_errors)]
cases += [case("semantics-000", r"x^2", {"mathml": ""}, semantics=True, annotate=True),
          case("semantics-001", r"\frac{a}{b}", {"mathml": ""}, semantics=True)]


def sample_input(name, arity, fn, params):
    """Mirrors the per-command inputs of the generator coverage test."""
    c = "\\" + name
    sp = " " if name[0].isalpha() else ""
    table = {
        "identifier": lambda: "2" + c + sp + "+ x",
        "operator": lambda: "a " + c + sp + " b",
        "bigop": lambda: c + "_{i=1}^{n} x_i",
        "namedfn": lambda: c + "_{n} x",
        "delimiter": lambda: c + sp + "x" + c,
        "space": lambda: "a" + c + sp + "b",
        "fence": lambda: r"\left( \frac{a}{b} \right." if params[0] == "left" else r"\left. x \right|_{0}",
        "bigdelim": lambda: c + "( x " + c + ")",
        "infix": lambda: "{a+1 " + c + " b}",
        "declstyle": lambda: "{" + c + " x^2 + y}",
        "matrix": lambda: "\\begin{%s}%s a & b \\\\ c & d \\end{%s}" % (name, "{cc}" if arity == "1" else "", name),
        "accent": lambda: c + "{x}",
        "underaccent": lambda: c + "{x}",
        "sqrt": lambda: c + "{x^2+1} + " + c + "[3]{y}",
        "style": lambda: c + "{Ax}",
        "text": lambda: c + "{if } x > 0",
        "opname": lambda: c + "{sgn} x",
        "phantom": lambda: "a" + c + "{b}c",
        "enclose": lambda: c + "{x+y}",
        "fraction": lambda: c + "{a}{b+1}",
        "overunder": lambda: c + "{!}{=}",
        "intent": lambda: c + "{(x,y)}{intent='open-interval($x,$y)'}",
    }
    return table[fn]()


dump = subprocess.run([texmathc, "registry"], capture_output=True, text=True, check=True).stdout
entries = []
in_commands = False
for line in dump.splitlines():
    if line.startswith("["):
        in_commands = line == "[commands]"
        continue
    if not in_commands or not line or line.startswith('"'):
        continue
    name, arity, fn, category, *params = line.split()
    if category == "chem-only":
        continue
    entries.append((name, arity, fn, params))

# Per-command cases fill the remainder, spread evenly over the registry.
need = TARGET - len(cases)
step = max(1, len(entries) // need)
for name, arity, fn, params in entries[::step][:need]:
    cases.append(case(f"command-{name}", sample_input(name, arity, fn, params), {"valid_only": True}))
if len(cases) != TARGET:
    sys.exit(f"expected {TARGET} cases, got {len(cases)}")
(corpus / "combined.json").write_text(json.dumps(cases, indent=2, ensure_ascii=False) + "\n")
print(f"wrote {len(cases)} cases")
