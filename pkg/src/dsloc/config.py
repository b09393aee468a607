"""Line-oriented run configuration.

Grammar (EBNF)::

    file      = { line } ;
    line      = blank | comment | section | entry ;
    comment   = "#" { any } ;
    section   = "[" name "]" ;
    entry     = key [ " " name ] "=" value ;

Sections and keys::

    [algebra]     even = a, b    odd = xi, eta    laurent = a
    [derivation]  image <var> = <expr>            (repeatable; omitted images are 0)
    [window]      cap = <int>    bounds <var> = <lo>..<hi>    margin = <int>
    [grading]     functional <label> = <var>:<int>, ...       (repeatable, ordered)
    [task]        kind = ds|koszul|localize|derham|primitive|catalog
                  output = text|structured    name = <catalog name>
                  expect_superdim = <even>, <odd>    expect_dims = <d0>, <d1>, ...
    [geometry]    subvariety = [v, ...]
                  probe_points = [{v: q, ...}, ...]
                  certificate = [(<expr>, <expr>), ...]
    [koszul]      t = [t1, ...]    base = [s1, ...]
    [pi_tangent]  base_vars = [x, ...]    laurent = [x, ...]

Expressions use the polynomial grammar of :mod:`dsloc.parser`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Presentation
from .errors import ConfigError, ParseError, PresentationError
from .parser import parse_expression

TASKS = ("ds", "koszul", "localize", "derham", "primitive", "catalog")
OUTPUTS = ("text", "structured")

_KEYS = {
    "algebra": {"even", "odd", "laurent"},
    "derivation": {"image"},
    "window": {"cap", "bounds", "margin"},
    "grading": {"functional"},
    "task": {"kind", "output", "name", "expect_superdim", "expect_dims"},
    "geometry": {"subvariety", "probe_points", "certificate"},
    "koszul": {"t", "base"},
    "pi_tangent": {"base_vars", "laurent"},
}
_NAMED = {"image", "bounds", "functional"}


@dataclass
class RunConfig:
    even: tuple = ()
    odd: tuple = ()
    laurent: tuple = ()
    images: tuple = ()  # ((var, expr text), ...)
    cap: int | None = None
    bounds: tuple = ()  # ((var, lo, hi), ...)
    margin: int | None = None
    functionals: tuple = ()  # ((label, ((var, w), ...)), ...)
    kind: str = "ds"
    output: str = "text"
    name: str | None = None
    expect_superdim: tuple | None = None
    expect_dims: tuple | None = None
    subvariety: tuple = ()
    probe_points: tuple = ()  # (((var, Fraction), ...), ...)
    certificate: tuple = ()  # ((expr, expr), ...)
    koszul_t: tuple = ()
    koszul_base: tuple = ()
    pi_base: tuple = ()
    pi_laurent: tuple = ()
    sections: tuple = field(default=(), compare=False)
    positions: dict = field(default_factory=dict, compare=False, repr=False)

    def presentation(self) -> Presentation:
        return Presentation.build(even=self.even, odd=self.odd, laurent=self.laurent)


# --- small value grammars -------------------------------------------------------------------


def _split_top(text: str, sep: str = ",") -> list:
    """Split at separators outside (), [], {}; returns (piece, offset) pairs."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    out.append((text[start:], start))
    return [(p.strip(), off + len(p) - len(p.lstrip())) for p, off in out if p.strip()]


def _strip_brackets(text: str, open_: str, close: str, line: int, col: int) -> tuple:
    t = text.strip()
    lead = len(text) - len(text.lstrip())
    if t.startswith(open_):
        if not t.endswith(close):
            raise ConfigError(f"missing closing {close!r}", line, col + lead + len(t))
        return t[1:-1], col + lead + 1
    return t, col + lead


def _names_list(text: str, line: int, col: int) -> tuple:
    inner, c0 = _strip_brackets(text, "[", "]", line, col)
    out = []
    for piece, off in _split_top(inner):
        if not piece.isidentifier():
            raise ConfigError(f"expected a variable name, found {piece!r}", line, c0 + off)
        out.append(piece)
    return tuple(out)


def _int(text: str, line: int, col: int) -> int:
    t = text.strip()
    try:
        return int(t)
    except ValueError:
        raise ConfigError(f"expected an integer, found {t!r}", line, col + len(text) - len(text.lstrip())) from None


def _rational(text: str, line: int, col: int) -> Fraction:
    t = text.strip()
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"expected a rational number, found {t!r}", line, col) from None


def _point(text: str, line: int, col: int) -> tuple:
    inner, c0 = _strip_brackets(text, "{", "}", line, col)
    vals = []
    for piece, off in _split_top(inner):
        if ":" not in piece:
            raise ConfigError(f"expected 'var: value', found {piece!r}", line, c0 + off)
        k, v = piece.split(":", 1)
        k = k.strip()
        if not k.isidentifier():
            raise ConfigError(f"expected a variable name, found {k!r}", line, c0 + off)
        vals.append((k, _rational(v, line, c0 + off + piece.index(":") + 1)))
    return tuple(sorted(vals))


def parse_points(text: str, line: int = 1, col: int = 1) -> tuple:
    inner, c0 = _strip_brackets(text, "[", "]", line, col)
    return tuple(_point(p, line, c0 + off) for p, off in _split_top(inner))


def _certificate(text: str, line: int, col: int) -> tuple:
    inner, c0 = _strip_brackets(text, "[", "]", line, col)
    out = []
    for piece, off in _split_top(inner):
        pair, c1 = _strip_brackets(piece, "(", ")", line, c0 + off)
        parts = _split_top(pair)
        if len(parts) != 2 or not piece.startswith("("):
            raise ConfigError("certificate entries must look like (g, xi)", line, c0 + off)
        out.append(((parts[0][0], c1 + parts[0][1]), (parts[1][0], c1 + parts[1][1])))
    return tuple(out)


def _functional(text: str, line: int, col: int) -> tuple:
    out = []
    for piece, off in _split_top(text):
        if ":" not in piece:
            raise ConfigError(f"expected 'var:weight', found {piece!r}", line, col + off)
        k, v = piece.split(":", 1)
        out.append((k.strip(), _int(v, line, col + off + piece.index(":") + 1)))
    return tuple(out)


def _int_list(text: str, line: int, col: int) -> tuple:
    inner, c0 = _strip_brackets(text, "[", "]", line, col)
    return tuple(_int(p, line, c0 + off) for p, off in _split_top(inner))


# --- parse ----------------------------------------------------------------------------------


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    pos = cfg.positions
    section = None
    seen: set = set()
    sections = []
    images, bounds, functionals, certs = [], [], [], []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        if body.startswith("["):
            if not body.endswith("]"):
                raise ConfigError("malformed section header", ln, indent + 1)
            section = body[1:-1].strip()
            if section not in _KEYS:
                raise ConfigError(f"unknown section [{section}]", ln, indent + 2)
            if section in sections:
                raise ConfigError(f"section [{section}] appears twice", ln, indent + 1)
            sections.append(section)
            continue
        if section is None:
            raise ConfigError("entry outside of any section", ln, indent + 1)
        if "=" not in body:
            raise ConfigError("expected 'key = value'", ln, indent + 1)
        lhs, rhs = line.split("=", 1)
        vcol = len(lhs) + 2
        words = lhs.split()
        key = words[0] if words else ""
        kcol = indent + 1
        if key not in _KEYS[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", ln, kcol)
        if key in _NAMED:
            if len(words) != 2:
                raise ConfigError(f"'{key}' needs exactly one name: '{key} <name> = ...'", ln, kcol)
            sub = words[1]
            subcol = lhs.index(sub, indent + len(key)) + 1
        elif len(words) != 1:
            raise ConfigError(f"unexpected text after key {key!r}", ln, kcol + len(key) + 1)
        ident = (section, key) if key not in _NAMED else (section, key, sub)
        if ident in seen:
            raise ConfigError(f"duplicate entry {' '.join(ident[1:])!r} in [{section}]", ln, kcol)
        seen.add(ident)
        if key not in _NAMED:
            pos[(section, key)] = (ln, vcol)
        if section == "algebra":
            setattr(cfg, key, _names_list(rhs, ln, vcol))
            pos[("algebra", key)] = (ln, vcol)
        elif section == "derivation":
            images.append((sub, rhs.strip()))
            pos[("image", sub)] = (ln, subcol, vcol + len(rhs) - len(rhs.lstrip()))
        elif section == "window":
            if key == "cap":
                cfg.cap = _int(rhs, ln, vcol)
            elif key == "margin":
                cfg.margin = _int(rhs, ln, vcol)
                if cfg.margin < 0:
                    raise ConfigError("margin must be non-negative", ln, vcol)
            else:
                if ".." not in rhs:
                    raise ConfigError("bounds must look like 'lo..hi'", ln, vcol)
                lo, hi = rhs.split("..", 1)
                lo_i, hi_i = _int(lo, ln, vcol), _int(hi, ln, vcol + len(lo) + 2)
                if lo_i > hi_i:
                    raise ConfigError(f"empty range {lo_i}..{hi_i}", ln, vcol)
                bounds.append((sub, lo_i, hi_i))
                pos[("bounds", sub)] = (ln, subcol, vcol)
        elif section == "grading":
            functionals.append((sub, _functional(rhs, ln, vcol)))
            pos[("functional", sub)] = (ln, vcol)
        elif section == "task":
            v = rhs.strip()
            if key == "kind":
                if v not in TASKS:
                    raise ConfigError(f"unknown task kind {v!r}; expected one of {', '.join(TASKS)}", ln, vcol)
                cfg.kind = v
            elif key == "output":
                if v not in OUTPUTS:
                    raise ConfigError(f"unknown output {v!r}; expected text or structured", ln, vcol)
                cfg.output = v
            elif key == "name":
                cfg.name = v
            elif key == "expect_superdim":
                vals = _int_list(rhs, ln, vcol)
                if len(vals) != 2:
                    raise ConfigError("expect_superdim needs two integers", ln, vcol)
                cfg.expect_superdim = vals
            else:
                cfg.expect_dims = _int_list(rhs, ln, vcol)
        elif section == "geometry":
            if key == "subvariety":
                cfg.subvariety = _names_list(rhs, ln, vcol)
                pos[("geometry", key)] = (ln, vcol)
            elif key == "probe_points":
                cfg.probe_points = parse_points(rhs, ln, vcol)
                pos[("geometry", key)] = (ln, vcol)
            else:
                certs = _certificate(rhs, ln, vcol)
                pos[("geometry", key)] = (ln, vcol)
        elif section == "koszul":
            vals = _names_list(rhs, ln, vcol)
            if key == "t":
                cfg.koszul_t = vals
            else:
                cfg.koszul_base = vals
        elif section == "pi_tangent":
            vals = _names_list(rhs, ln, vcol)
            if key == "base_vars":
                cfg.pi_base = vals
            else:
                cfg.pi_laurent = vals
            pos[("pi_tangent", key)] = (ln, vcol)
    cfg.images = tuple(images)
    cfg.bounds = tuple(bounds)
    cfg.functionals = tuple(functionals)
    cfg.certificate = tuple((g, x) for (g, _), (x, _) in certs)
    pos["certificate_cols"] = [(gc, xc) for (_, gc), (_, xc) in certs]
    cfg.sections = tuple(sections)
    validate(cfg)
    return cfg


def _where(cfg: RunConfig, key) -> tuple:
    p = cfg.positions.get(key)
    return (p[0], p[1]) if p else (None, None)


def validate(cfg: RunConfig) -> None:
    """Semantic checks that need the whole file; raises ConfigError with a position."""
    kind = cfg.kind
    if cfg.expect_dims is not None and kind != "derham":
        raise ConfigError(f"'expect_dims' applies only to task 'derham', not {kind!r}",
                          *_where(cfg, ("task", "expect_dims")))
    if cfg.expect_superdim is not None and kind in ("koszul", "catalog"):
        raise ConfigError(f"'expect_superdim' is not checked by task {kind!r}",
                          *_where(cfg, ("task", "expect_superdim")))
    if kind == "catalog":
        if not cfg.name:
            raise ConfigError("task 'catalog' needs 'name' in [task]")
        from .scenarios import catalog_names
        if cfg.name not in catalog_names():
            raise ConfigError(f"unknown scenario {cfg.name!r}; available: {', '.join(catalog_names())}",
                              *_where(cfg, ("task", "name")))
        return
    if kind == "koszul":
        if not cfg.koszul_t:
            raise ConfigError("task 'koszul' needs a [koszul] section with 't'")
        return
    if kind == "derham":
        if not cfg.pi_base:
            raise ConfigError("task 'derham' needs a [pi_tangent] section with 'base_vars'")
        bad = set(cfg.pi_laurent) - set(cfg.pi_base)
        if bad:
            raise ConfigError(f"laurent variables {sorted(bad)} are not base variables",
                              *_where(cfg, ("pi_tangent", "laurent")))
        _check_bounds(cfg, set(cfg.pi_base), set(cfg.pi_laurent))
        return
    if "algebra" not in cfg.sections:
        raise ConfigError(f"task {kind!r} needs an [algebra] section")
    if "derivation" not in cfg.sections:
        raise ConfigError(f"task {kind!r} needs a [derivation] section (it may be empty for Q = 0)")
    try:
        pres = cfg.presentation()
    except PresentationError as exc:
        raise ConfigError(str(exc), *_where(cfg, ("algebra", "laurent"))) from None
    for var, expr in cfg.images:
        ln, vc, ec = cfg.positions.get(("image", var), (None, None, None))
        if var not in pres:
            raise ConfigError(f"image given for undeclared variable {var!r}", ln, vc)
        try:
            f = parse_expression(expr, pres)
        except ParseError as exc:
            msg = str(exc).split(" (at position")[0]
            col = ec + exc.position if (ec is not None and exc.position is not None) else ec
            raise ConfigError(msg, ln, col) from None
        want = 1 - pres.variable(var).parity
        if not f.is_zero() and f.parity() != want:
            raise ConfigError(f"image of {var!r} must be {'odd' if want else 'even'}", ln, ec)
    _check_bounds(cfg, set(pres.even_names), {v.name for v in pres.even if v.laurent})
    for label, fn in cfg.functionals:
        for v, _ in fn:
            if v not in pres:
                raise ConfigError(f"grading functional {label!r} uses undeclared variable {v!r}",
                                  *_where(cfg, ("functional", label)))
    for n in cfg.subvariety:
        if n not in pres:
            raise ConfigError(f"subvariety uses undeclared variable {n!r}", *_where(cfg, ("geometry", "subvariety")))
        if pres.variable(n).laurent:
            raise ConfigError(f"laurent variable {n!r} cannot vanish on a subvariety",
                              *_where(cfg, ("geometry", "subvariety")))
    for pt in cfg.probe_points:
        for n, val in pt:
            if n not in pres or pres.variable(n).odd:
                raise ConfigError(f"probe point uses unknown or odd variable {n!r}",
                                  *_where(cfg, ("geometry", "probe_points")))
    cert_cols = cfg.positions.get("certificate_cols", [])
    ln = _where(cfg, ("geometry", "certificate"))[0]
    for i, (g, x) in enumerate(cfg.certificate):
        for text, col in zip((g, x), cert_cols[i] if i < len(cert_cols) else (None, None)):
            try:
                parse_expression(text, pres)
            except ParseError as exc:
                raise ConfigError(str(exc).split(" (at position")[0], ln,
                                  None if col is None else col + (exc.position or 0)) from None
    if kind == "localize" and not cfg.subvariety:
        raise ConfigError("task 'localize' needs 'subvariety' in [geometry]")
    if kind == "primitive" and not cfg.certificate:
        raise ConfigError("task 'primitive' needs 'certificate' in [geometry]")
    if kind in ("ds", "localize", "primitive") and cfg.cap is None and not cfg.bounds:
        raise ConfigError(f"task {kind!r} needs a [window] section with 'cap' or 'bounds'")


def _check_bounds(cfg: RunConfig, even: set, laurent: set):
    for var, lo, hi in cfg.bounds:
        ln, vc, bc = cfg.positions.get(("bounds", var), (None, None, None))
        if var not in even:
            raise ConfigError(f"bounds given for undeclared or odd variable {var!r}", ln, vc)
        if lo < 0 and var not in laurent:
            raise ConfigError(f"negative exponent bound for non-laurent variable {var!r}", ln, bc)


# --- render ---------------------------------------------------------------------------------------


def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render_config(cfg: RunConfig) -> str:
    """Canonical text for a configuration; parse_config inverts it."""
    out = []

    def sec(name):
        if out:
            out.append("")
        out.append(f"[{name}]")

    if cfg.even or cfg.odd or cfg.laurent or "algebra" in cfg.sections:
        sec("algebra")
        out.append(f"even = [{', '.join(cfg.even)}]")
        out.append(f"odd = [{', '.join(cfg.odd)}]")
        out.append(f"laurent = [{', '.join(cfg.laurent)}]")
    if cfg.images or "derivation" in cfg.sections or cfg.kind in ("ds", "localize", "primitive"):
        sec("derivation")
        out += [f"image {v} = {e}" for v, e in cfg.images]
    if cfg.cap is not None or cfg.bounds or cfg.margin is not None:
        sec("window")
        if cfg.cap is not None:
            out.append(f"cap = {cfg.cap}")
        out += [f"bounds {v} = {lo}..{hi}" for v, lo, hi in cfg.bounds]
        if cfg.margin is not None:
            out.append(f"margin = {cfg.margin}")
    if cfg.functionals:
        sec("grading")
        out += [f"functional {l} = " + ", ".join(f"{v}:{w}" for v, w in fn) for l, fn in cfg.functionals]
    sec("task")
    out.append(f"kind = {cfg.kind}")
    out.append(f"output = {cfg.output}")
    if cfg.name:
        out.append(f"name = {cfg.name}")
    if cfg.expect_superdim is not None:
        out.append(f"expect_superdim = {cfg.expect_superdim[0]}, {cfg.expect_superdim[1]}")
    if cfg.expect_dims is not None:
        out.append("expect_dims = " + ", ".join(map(str, cfg.expect_dims)))
    if cfg.subvariety or cfg.probe_points or cfg.certificate:
        sec("geometry")
        if cfg.subvariety:
            out.append(f"subvariety = [{', '.join(cfg.subvariety)}]")
        if cfg.probe_points:
            pts = ["{" + ", ".join(f"{k}: {_fmt_q(v)}" for k, v in p) + "}" for p in cfg.probe_points]
            out.append(f"probe_points = [{', '.join(pts)}]")
        if cfg.certificate:
            out.append("certificate = [" + ", ".join(f"({g}, {x})" for g, x in cfg.certificate) + "]")
    if cfg.koszul_t:
        sec("koszul")
        out.append(f"t = [{', '.join(cfg.koszul_t)}]")
        out.append(f"base = [{', '.join(cfg.koszul_base)}]")
    if cfg.pi_base:
        sec("pi_tangent")
        out.append(f"base_vars = [{', '.join(cfg.pi_base)}]")
        out.append(f"laurent = [{', '.join(cfg.pi_laurent)}]")
    return "\n".join(out) + "\n"
