"""Inline generator specs such as ``walk:depth=5`` or
``random:depth=5,branch=3,seed=7``."""

from __future__ import annotations

from .tree import (AdaptedProcess, gen_random_martingale, gen_symmetric_walk,
                   gen_transform, sign_transform_multipliers)

KINDS = ("walk", "random", "transform")


class SpecError(ValueError):
    pass


def parse_spec(spec: str) -> tuple[str, dict[str, str]]:
    kind, _, rest = spec.strip().partition(":")
    if kind not in KINDS:
        raise SpecError(f"unknown family {kind!r}; expected one of {', '.join(KINDS)}")
    opts = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq or not key:
            raise SpecError(f"malformed option {item!r} in {spec!r}")
        opts[key.strip()] = val.strip()
    return kind, opts


def _int(opts, key, default):
    try:
        return int(opts.get(key, default))
    except ValueError:
        raise SpecError(f"option {key}={opts[key]!r} is not an integer") from None


def build_family(spec: str, depth: int | None = None,
                 seed: int | None = None) -> list[tuple[str, AdaptedProcess]]:
    """Martingales named by ``spec``; ``depth``/``seed`` fill in options the
    spec leaves out.

    - ``walk``: the symmetric walk plus its mean-reverting and momentum
      sign transforms
    - ``random``: ``count`` random martingales with seeds ``seed, seed+1, ...``
      (options ``branch``, ``scale``)
    - ``transform``: one sign transform of the walk (``mode=revert|momentum``)
    """
    kind, opts = parse_spec(spec)
    known = {"walk": {"depth"}, "random": {"depth", "branch", "seed", "count", "scale"},
             "transform": {"depth", "mode"}}[kind]
    extra = set(opts) - known
    if extra:
        raise SpecError(f"unknown option(s) {sorted(extra)} for {kind}")
    d = _int(opts, "depth", depth if depth is not None else 4)
    if kind == "walk":
        w = gen_symmetric_walk(d)
        return [(f"walk:depth={d}", w),
                (f"transform:depth={d},mode=revert",
                 gen_transform(w, sign_transform_multipliers(w, "revert"))),
                (f"transform:depth={d},mode=momentum",
                 gen_transform(w, sign_transform_multipliers(w, "momentum")))]
    if kind == "transform":
        mode = opts.get("mode", "revert")
        w = gen_symmetric_walk(d)
        try:
            m = sign_transform_multipliers(w, mode)
        except ValueError as exc:
            raise SpecError(str(exc)) from None
        return [(f"transform:depth={d},mode={mode}", gen_transform(w, m))]
    b = _int(opts, "branch", 2)
    s0 = _int(opts, "seed", seed if seed is not None else 0)
    count = _int(opts, "count", 1)
    try:
        scale = float(opts.get("scale", 1.0))
    except ValueError:
        raise SpecError(f"option scale={opts['scale']!r} is not a number") from None
    return [(f"random:depth={d},branch={b},seed={s}",
             gen_random_martingale(d, b, s, scale)) for s in range(s0, s0 + count)]
