"""Batch verification CLI.

Verbs:
  verify <suite>   run a named suite over a parameter grid
  ledger <id>      dump the torus-cell ledger of one identity (gj | local)
  orbits <m> <n> <q>   enumerate the double-coset orbits

Suites: cosets, stabilizers, kron-props, gj, local-identity, arch-iwasawa,
and all.  Exit codes: 0 all checks pass, 1 some check failed, 2 bad
configuration.  A fixed seed makes the emitted reports byte-identical.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import arch, cosets, padic, zeta
from .errors import ConfigError, IdentityFailed, KronzetaError
from .matgroup import (
    ExactMatrix,
    kronecker,
    random_invertible,
    star_plain,
    verify_modulus_compatibility,
)
from .report import (
    CheckRecord,
    Report,
    emit,
    ledger_csv_text,
    orbit_csv_text,
    orbit_json,
    plot_orbit_table,
    plot_residuals,
    plot_series_comparison,
)
from .rings import QQ, PrimeField, dumps_sorted

SUITES = (
    "cosets",
    "stabilizers",
    "kron-props",
    "gj",
    "local-identity",
    "arch-iwasawa",
    "all",
)


@dataclass
class RunConfig:
    suite: str = "all"
    order: int = 12
    seed: int = 0
    alpha_samples: int = 5
    orbit_shapes: tuple = ((2, 2, 2), (2, 2, 3), (3, 2, 2))
    stabilizer_shapes: tuple = ((2, 2, 2), (2, 2, 3), (3, 2, 2))
    tensor_shapes: tuple = ((2, 2), (2, 3), (3, 2))
    modulus_shapes: tuple = ((2, 1), (3, 2), (4, 2))
    gj_ranks: tuple = (1, 2, 3)
    gj_primes: tuple = (2, 3, 5)
    local_shapes: tuple = ((2, 2), (3, 2), (3, 3))
    arch_shapes: tuple = ((2, 2), (3, 2), (3, 3))
    kron_checks: int = 250
    orbit_budget: int = 10**7
    pair_budget: int = 10**7
    out: str = "reports/report"
    format: str = "json"
    plots: bool = True
    timings: bool = False

    def validate(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.order < 0:
            raise ConfigError("order must be nonnegative")
        if self.orbit_budget <= 0 or self.pair_budget <= 0:
            raise ConfigError("budgets must be positive")
        if self.alpha_samples <= 0 or self.kron_checks <= 0:
            raise ConfigError("sample counts must be positive")
        if self.format not in ("json", "csv", "markdown"):
            raise ConfigError(f"unknown format {self.format!r}")

    def public_dict(self) -> dict:
        doc = asdict(self)
        for key, value in doc.items():
            if isinstance(value, tuple):
                doc[key] = [list(v) if isinstance(v, tuple) else v for v in value]
        return doc


def _rng_for(config: RunConfig, label: str) -> random.Random:
    return random.Random(f"{config.seed}:{label}")


def sample_regular_alphas(n: int, rng: random.Random) -> tuple:
    """Distinct nonzero small rationals; collisions are rejected."""
    out = []
    while len(out) < n:
        cand = Fraction(rng.randint(1, 8), rng.randint(1, 4)) * rng.choice((1, -1))
        if cand != 0 and cand not in out:
            out.append(cand)
    return tuple(out)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def _timed(record: CheckRecord, started: float) -> CheckRecord:
    record.wall_time = time.perf_counter() - started
    return record


def run_cosets(config: RunConfig, report: Report) -> list:
    figures = []
    tables = []
    for m, n, q in config.orbit_shapes:
        started = time.perf_counter()
        table = cosets.enumerate_orbits(m, n, q, budget=config.orbit_budget)
        expected = min(m, n)
        eps_distinct = True
        if n <= m:
            holders = [row.orbit_id for row in table.orbits if row.epsilon_ranks]
            covered = sorted(
                r for row in table.orbits for r in row.epsilon_ranks
            )
            eps_distinct = covered == list(range(n)) and len(holders) == n
        ok = len(table.orbits) == expected and eps_distinct
        report.add(
            _timed(
                CheckRecord(
                    "orbit-count",
                    {"m": m, "n": n, "q": q},
                    "pass" if ok else "fail",
                    {
                        "orbits": len(table.orbits),
                        "expected": expected,
                        "sizes": list(table.sizes),
                        "points": table.points,
                        "epsilon_reps_distinct": eps_distinct,
                    },
                ),
                started,
            )
        )
        tables.append(table)

        started = time.perf_counter()
        rng = _rng_for(config, f"orbit-lemma:{m}:{n}:{q}")
        ok = cosets.verify_orbit_lemma(m, n, q, trials=50, rng=rng)
        report.add(
            _timed(
                CheckRecord(
                    "orbit-lemma",
                    {"m": m, "n": n, "q": q, "trials": 50},
                    "pass" if ok else "fail",
                    {},
                ),
                started,
            )
        )

        started = time.perf_counter()
        rng = _rng_for(config, f"classify:{m}:{n}:{q}")
        field_q = PrimeField(q)
        ok = True
        for _ in range(10):
            g = random_invertible(field_q, m * n, rng)
            cls = cosets.classify_double_coset(g, m, n)
            p_wit, h_wit, g_wit = cls.witness
            eps = cosets.epsilon_rep(field_q, m, n, cls.r)
            ok = ok and p_wit * eps * kronecker(h_wit, g_wit) == g
        report.add(
            _timed(
                CheckRecord(
                    "classifier-witness",
                    {"m": m, "n": n, "q": q, "trials": 10},
                    "pass" if ok else "fail",
                    {},
                ),
                started,
            )
        )
    if config.plots and tables:
        figures.append(lambda path, table=tables[-1]: plot_orbit_table(table, path))
    return figures


def run_stabilizers(config: RunConfig, report: Report) -> list:
    for m, n, q in config.stabilizer_shapes:
        for r in range(n):
            started = time.perf_counter()
            brute = cosets.stabilizer_bruteforce(m, n, r, q, budget=config.pair_budget)
            predicted = cosets.stabilizer_predicted(m, n, r, q)
            ok = brute == predicted
            report.add(
                _timed(
                    CheckRecord(
                        "stabilizer-set",
                        {"m": m, "n": n, "r": r, "q": q},
                        "pass" if ok else "fail",
                        {"brute": len(brute), "predicted": len(predicted)},
                    ),
                    started,
                )
            )
    for l, q in config.tensor_shapes:
        started = time.perf_counter()
        ok = cosets.verify_tensor_inv_lemma(l, q, budget=config.pair_budget)
        report.add(
            _timed(
                CheckRecord(
                    "tensor-fixed-vector",
                    {"l": l, "q": q},
                    "pass" if ok else "fail",
                    {"pairs": q ** (2 * l * l)},
                ),
                started,
            )
        )
    return []


def run_kron_props(config: RunConfig, report: Report) -> list:
    rng = _rng_for(config, "kron")
    shapes = [(2, 2), (2, 3), (3, 2)]
    rings = [QQ, PrimeField(2), PrimeField(3), PrimeField(5)]
    laws = ("mixed-product", "transpose", "determinant", "star")
    counts = dict.fromkeys(laws, 0)
    started = time.perf_counter()
    ok = True
    for _ in range(config.kron_checks):
        m, n = rng.choice(shapes)
        ring = rng.choice(rings)
        h = random_invertible(ring, m, rng)
        g = random_invertible(ring, n, rng)
        t_hg = kronecker(h, g)
        id_m = ExactMatrix.identity(ring, m)
        id_n = ExactMatrix.identity(ring, n)
        left = kronecker(h, id_n) * kronecker(id_m, g)
        right = kronecker(id_m, g) * kronecker(h, id_n)
        ok = ok and t_hg == left == right
        counts["mixed-product"] += 1
        ok = ok and t_hg.transpose() == kronecker(h.transpose(), g.transpose())
        counts["transpose"] += 1
        det_t = t_hg.det()
        expect = h.det() ** n * g.det() ** m
        ok = ok and det_t == expect
        counts["determinant"] += 1
        ok = ok and star_plain(t_hg) == kronecker(star_plain(h), star_plain(g))
        counts["star"] += 1
        if not ok:
            break
    report.add(
        _timed(
            CheckRecord(
                "kron-laws",
                {"checks": config.kron_checks},
                "pass" if ok else "fail",
                {"by_law": counts},
            ),
            started,
        )
    )

    started = time.perf_counter()
    rng = _rng_for(config, "modulus")
    ok = True
    for m, n in config.modulus_shapes:
        for _ in range(30):
            p = _random_parabolic(m, n, rng)
            if not verify_modulus_compatibility(m, n, p):
                ok = False
                break
    report.add(
        _timed(
            CheckRecord(
                "modulus-compatibility",
                {"shapes": [list(s) for s in config.modulus_shapes], "trials": 30},
                "pass" if ok else "fail",
                {},
            ),
            started,
        )
    )
    return []


def _random_parabolic(m: int, n: int, rng) -> ExactMatrix:
    top = random_invertible(QQ, m - n, rng) if m > n else None
    bottom = random_invertible(QQ, n, rng)
    rows = []
    for i in range(m - n):
        row = list(top.entries[i])
        row += [Fraction(rng.randint(-5, 5)) for _ in range(n)]
        rows.append(row)
    for i in range(n):
        rows.append([Fraction(0)] * (m - n) + list(bottom.entries[i]))
    return ExactMatrix(QQ, rows)


def run_gj(config: RunConfig, report: Report) -> list:
    figures = []
    sample_pairs = []
    for n in config.gj_ranks:
        for q in config.gj_primes:
            rng = _rng_for(config, f"gj:{n}:{q}")
            started = time.perf_counter()
            status = "pass"
            detail = {}
            for _ in range(config.alpha_samples):
                alphas = sample_regular_alphas(n, rng)
                params = zeta.SatakeParams(alphas, q)
                try:
                    result = zeta.verify_gj_identity(params, config.order)
                except IdentityFailed as exc:
                    status = "fail"
                    detail = {
                        "alphas": [str(a) for a in alphas],
                        "first_mismatch": exc.first_mismatch,
                    }
                    break
                sample_pairs.append((result.ledger.series, result.closed_form))
            report.add(
                _timed(
                    CheckRecord(
                        "gj-identity",
                        {"n": n, "q": q, "samples": config.alpha_samples,
                         "order": config.order},
                        status,
                        detail,
                    ),
                    started,
                )
            )
    if config.plots and sample_pairs:
        pair = sample_pairs[-1]
        figures.append(
            lambda path, pair=pair: plot_series_comparison(
                [pair], ["gj"], path, "Godement-Jacquet torus sum vs L-factor"
            )
        )
    return figures


def run_local_identity(config: RunConfig, report: Report) -> list:
    figures = []
    sample = None
    for m, n in config.local_shapes:
        for q in config.gj_primes:
            rng = _rng_for(config, f"local:{m}:{n}:{q}")
            started = time.perf_counter()
            status = "pass"
            detail = {"variant_b_first_mismatch": []}
            for _ in range(config.alpha_samples):
                alphas = sample_regular_alphas(n, rng)
                params = zeta.SatakeParams(alphas, q)
                try:
                    result = zeta.verify_local_identity(m, params, config.order)
                except IdentityFailed as exc:
                    status = "fail"
                    detail = {
                        "alphas": [str(a) for a in alphas],
                        "first_mismatch": exc.first_mismatch,
                    }
                    break
                if not result.variant_a.matches:
                    status = "fail"
                    detail["variant_a_first_mismatch"] = result.variant_a.first_mismatch
                    break
                mismatch = result.variant_b.first_mismatch
                if mismatch not in detail["variant_b_first_mismatch"]:
                    detail["variant_b_first_mismatch"].append(mismatch)
                sample = result
            report.add(
                _timed(
                    CheckRecord(
                        "local-identity-variant-a",
                        {"m": m, "n": n, "q": q, "samples": config.alpha_samples,
                         "order": config.order},
                        status,
                        detail,
                    ),
                    started,
                )
            )
            if status == "pass" and n >= 2:
                report.add(
                    CheckRecord(
                        "local-identity-variant-b-divergence",
                        {"m": m, "n": n, "q": q},
                        "info",
                        {
                            "first_mismatch_degrees": detail[
                                "variant_b_first_mismatch"
                            ],
                            "note": "literal second denominator variant; "
                            "divergence is expected and informational",
                        },
                    )
                )
    if config.plots and sample is not None:
        figures.append(
            lambda path, s=sample: plot_series_comparison(
                [(s.torus_sum, s.variant_a.series)],
                [f"m={s.m},n={s.params.n}"],
                path,
                "local torus sum vs closed form (variant A)",
            )
        )
    return figures


def run_arch(config: RunConfig, report: Report) -> list:
    figures = []
    rng = _rng_for(config, "arch")
    started = time.perf_counter()
    residuals = []
    ok = True
    for _ in range(100):
        n = rng.randint(2, 8)
        point = sorted(rng.uniform(0.05, 1.0) for _ in range(n - 1))
        vecs, norms_sq = arch.closed_form_vectors(point)
        oracle = arch.mgs_vectors(
            arch.torus_matrix(point)[::-1]
        )  # rows processed last first
        err = float(abs(vecs - oracle).max())
        residuals.append(err)
        ok = ok and err < 1e-10
    report.add(
        _timed(
            CheckRecord(
                "gram-schmidt-closed-form",
                {"trials": 100, "max_n": 8},
                "pass" if ok else "fail",
                {"max_residual": max(residuals)},
            ),
            started,
        )
    )

    started = time.perf_counter()
    ok = True
    exps_detail = []
    for m, n in config.arch_shapes:
        point = tuple(
            sorted(_rng_for(config, f"arch:{m}:{n}").uniform(0.2, 0.9) for _ in range(n - 1))
        )
        result = arch.section_value_exponents(m, n, point)
        ok = ok and abs(result.det_power - m) < 1e-8
        ok = ok and abs(result.phi_power + m * n / 2) < 1e-8
        exps_detail.append(
            {
                "m": m,
                "n": n,
                "det_power": round(result.det_power, 12),
                "phi_power": round(result.phi_power, 12),
            }
        )
    report.add(
        _timed(
            CheckRecord(
                "section-exponents",
                {"shapes": [list(s) for s in config.arch_shapes]},
                "pass" if ok else "fail",
                {"measured": exps_detail},
            ),
            started,
        )
    )
    if config.plots:
        figures.append(
            lambda path, res=residuals: plot_residuals(
                res, path, "closed form vs iterative orthogonalization",
                "max componentwise residual",
            )
        )
    return figures


_SUITE_RUNNERS = {
    "cosets": run_cosets,
    "stabilizers": run_stabilizers,
    "kron-props": run_kron_props,
    "gj": run_gj,
    "local-identity": run_local_identity,
    "arch-iwasawa": run_arch,
}


def run_suite(config: RunConfig) -> Report:
    config.validate()
    report = Report(suite=config.suite, config=config.public_dict())
    names = list(_SUITE_RUNNERS) if config.suite == "all" else [config.suite]
    figures = []
    for name in names:
        figures.extend(_SUITE_RUNNERS[name](config, report))
    report._figures = figures  # carried for emission, not serialized
    return report


# ---------------------------------------------------------------------------
# Argument parsing / entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kronzeta",
        description="Exact verification suites for the Kronecker-embedding "
        "coset geometry and the unramified local zeta identities.",
    )
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--order", type=int, help="series truncation order")
    parser.add_argument("--seed", type=int, help="PRNG seed")
    parser.add_argument("--out", type=Path, help="output stem for reports")
    parser.add_argument(
        "--format", choices=("json", "csv", "markdown"), help="report format"
    )
    parser.add_argument("--samples", type=int, help="alpha samples per grid cell")
    parser.add_argument(
        "--no-plots", action="store_true", help="skip figure rendering"
    )
    parser.add_argument(
        "--timings", action="store_true", help="include wall times in reports"
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=SUITES)

    p_ledger = sub.add_parser("ledger", help="dump a torus-cell ledger")
    p_ledger.add_argument("identity", choices=("gj", "local"))
    p_ledger.add_argument("--n", type=int, default=2)
    p_ledger.add_argument("--m", type=int, default=2)
    p_ledger.add_argument("--q", type=int, default=3)
    p_ledger.add_argument(
        "--alphas", type=str, default="2,3", help="comma-separated rationals"
    )

    p_orbits = sub.add_parser("orbits", help="enumerate double-coset orbits")
    p_orbits.add_argument("m", type=int)
    p_orbits.add_argument("n", type=int)
    p_orbits.add_argument("q", type=int)
    return parser


def _load_config(args) -> RunConfig:
    config = RunConfig()
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        for key, value in doc.items():
            if not hasattr(config, key):
                raise ConfigError(f"unknown config key {key!r}")
            if isinstance(getattr(config, key), tuple):
                value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
            setattr(config, key, value)
    if args.order is not None:
        config.order = args.order
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.out = str(args.out)
    if args.format is not None:
        config.format = args.format
    if getattr(args, "samples", None) is not None:
        config.alpha_samples = args.samples
    if args.no_plots:
        config.plots = False
    if args.timings:
        config.timings = True
    return config


def _cmd_verify(args) -> int:
    config = _load_config(args)
    config.suite = args.suite
    config.validate()
    report = run_suite(config)
    paths = emit(
        report,
        config.format,
        Path(config.out),
        include_timings=config.timings,
        figures=getattr(report, "_figures", None) if config.plots else None,
    )
    counts = report.summary()
    print(
        f"suite {config.suite}: {counts.get('pass', 0)} passed, "
        f"{counts.get('fail', 0)} failed, {counts.get('info', 0)} informational"
    )
    for path in paths:
        print(f"wrote {path}")
    return 0 if report.passed else 1


def _parse_alphas(text: str) -> tuple:
    try:
        return tuple(Fraction(part) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad alpha list {text!r}") from exc


def _cmd_ledger(args) -> int:
    config = _load_config(args)
    alphas = _parse_alphas(args.alphas)
    if len(alphas) != args.n:
        raise ConfigError(f"{len(alphas)} alphas for n = {args.n}")
    params = zeta.SatakeParams(alphas, args.q)
    if args.identity == "gj":
        ledger = zeta.gj_torus_ledger(params, config.order)
    else:
        ledger = zeta.local_torus_ledger(args.m, params, config.order)
    out = Path(config.out).with_suffix(".csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(ledger_csv_text(ledger))
    print(f"wrote {out} ({len(ledger.rows)} cells)")
    return 0


def _cmd_orbits(args) -> int:
    config = _load_config(args)
    table = cosets.enumerate_orbits(args.m, args.n, args.q, budget=config.orbit_budget)
    out = Path(config.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    csv_path = out.with_suffix(".csv")
    csv_path.write_text(orbit_csv_text(table))
    json_path = out.with_suffix(".json")
    json_path.write_text(dumps_sorted(orbit_json(table)))
    written = [csv_path, json_path]
    if config.plots:
        written.append(plot_orbit_table(table, out.parent / f"{out.name}_orbits.png"))
    for path in written:
        print(f"wrote {path}")
    print(
        f"{len(table.orbits)} orbits on {table.points} points; "
        f"sizes {list(table.sizes)}"
    )
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "verify":
            return _cmd_verify(args)
        if args.verb == "ledger":
            return _cmd_ledger(args)
        if args.verb == "orbits":
            return _cmd_orbits(args)
        raise ConfigError(f"unknown verb {args.verb!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KronzetaError as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
