#!/usr/bin/env python3
"""
Command-Line Interface for the Eisenstein toolkit
compute / verify / analytics subcommands over JSON job configurations
"""

import argparse
import json
import sys
import time
from typing import Any, Dict, List, Optional, Tuple

from data_loader import CoefficientCache, ConfigError, JobConfig, load_config
from eisenstein_engine import EisensteinSpec, FourierTable, fourier_table, untwisted_series
from exact_arith import ContractViolation, ExactModeUnavailable, format_fraction
from logger import DEFAULT_LOG_FILE, RunLogger
from oracles import BudgetExceededError
from verification import SUITES, PropertyResult, VerifyContext, run_suite, summarize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION_FAILED = 2
EXIT_BUDGET = 3


def status(message: str) -> None:
    """Progress lines go to stderr so stdout carries only the JSON document."""
    print(message, file=sys.stderr)


def banner(title: str) -> None:
    status("\n" + "=" * 60)
    status(title)
    status("=" * 60)


def table_document(table: FourierTable) -> Dict[str, Any]:
    records = table.records()
    document = {
        "label": table.label,
        "mode_used": table.meta.get("mode_used", table.mode),
        "n_max": format_fraction(table.n_max),
        "constant_term": [r for r in records if r["n"] == "0/1"],
        "coefficients": [r for r in records if r["n"] != "0/1"],
    }
    for key in ("fallback_reason", "vanishing", "conditions", "fallbacks"):
        if table.meta.get(key):
            document[key] = table.meta[key]
    return document


class EisensteinCLI:
    """
    Runs compute and verify jobs for one configuration.

    Args:
        config: The validated job configuration
        logger: Run logger (one JSON line per run)
        use_cache: Read and write the coefficient cache
    """

    def __init__(self, config: JobConfig, logger: RunLogger, use_cache: bool = True):
        self.config = config
        self.logger = logger
        self.cache = CoefficientCache(config.cache_dir) if use_cache else None

    def _spec(self, chi) -> EisensteinSpec:
        cfg = self.config
        return EisensteinSpec(cfg.lattice_obj, cfg.beta_element, cfg.weight, chi, cfg.form)

    def build_document(self) -> Dict[str, Any]:
        """Compute every requested table and assemble the output document."""
        cfg = self.config
        characters = cfg.characters()
        tables = {}
        for chi in characters:
            status(f"Computing E[{chi.label}] to n = {format_fraction(cfg.n_max)} ({cfg.mode})...")
            tables[chi.label] = fourier_table(self._spec(chi), cfg.n_max, cfg.mode, cfg.precision_bits, cfg.jobs)
            status(f"✓ {chi.label}: {tables[chi.label].meta.get('mode_used')}")

        metadata = self._spec(characters[0]).describe()
        metadata.pop("character")
        metadata["characters"] = [chi.label for chi in characters]
        metadata["mode_requested"] = cfg.mode
        used = sorted({t.meta.get("mode_used", t.mode) for t in tables.values()})
        metadata["mode_used"] = used[0] if len(used) == 1 else "mixed"
        metadata["n_max"] = format_fraction(cfg.n_max)

        document: Dict[str, Any] = {
            "metadata": metadata,
            "tables": [table_document(tables[chi.label]) for chi in characters],
        }
        if cfg.character == "all":
            status("Recombining the untwisted series...")
            untwisted = untwisted_series(cfg.lattice_obj, cfg.beta_element, cfg.weight, cfg.n_max, cfg.mode,
                                         cfg.precision_bits, cfg.jobs, cfg.form, tables=tables)
            document["untwisted"] = table_document(untwisted)
        return document

    def run_compute(self) -> Tuple[str, bool]:
        """
        Returns:
            (JSON text, cache hit). A hit returns the stored text unchanged.
        """
        key = self.config.content_hash()
        if self.cache is not None:
            cached = self.cache.load_from_cache(key)
            if cached is not None:
                status(f"✓ Cache hit {key[:12]}")
                return cached, True
        text = json.dumps(self.build_document(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        if self.cache is not None:
            self.cache.save_to_cache(key, text, {"lattice": self.config.lattice,
                                                 "weight_twice": self.config.weight_twice,
                                                 "character": self.config.character,
                                                 "n_max": format_fraction(self.config.n_max)})
            status(f"✓ Cached as {key[:12]}")
        return text, False

    def run_verify(self, suite: str) -> List[PropertyResult]:
        cfg = self.config
        context = VerifyContext(
            lattice=cfg.lattice_obj, form=cfg.form, weight=cfg.weight, beta=cfg.beta_element,
            characters=cfg.characters(), n_max=cfg.n_max, c_max=cfg.c_max, mode=cfg.mode, jobs=cfg.jobs,
            precision_bits=cfg.precision_bits,
        )
        banner(f"VERIFY: {suite}")
        results = run_suite(suite, context)
        for result in results:
            if result.skipped:
                status(f"- {result.name}: skipped ({result.detail.get('reason', '')})")
            elif result.passed:
                status(f"✓ {result.name}")
            elif result.budget_exceeded:
                status(f"! {result.name}: budget exceeded")
            else:
                status(f"✗ {result.name}: {json.dumps(result.detail.get('counterexample', result.detail))}")
        counts = summarize(results)
        status("=" * 60)
        status(f"{counts['passed']} passed, {counts['failed']} failed, {counts['skipped']} skipped, "
               f"{counts['budget_exceeded']} over budget")
        return results


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; 2 is reserved for verification failures here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"ERROR: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(description='Vector-valued Eisenstein series - Command Line Interface')
    parser.add_argument('--log-file', type=str, default=DEFAULT_LOG_FILE,
                        help='JSONL run log (default: %(default)s)')
    sub = parser.add_subparsers(dest='command')

    def job_options(p):
        p.add_argument('--config', type=str, required=True, help='JSON job configuration')
        p.add_argument('--mode', type=str, default=None, help='exact, numeric or auto')
        p.add_argument('--nmax', type=str, default=None, help='depth of the tables, e.g. 3 or 7/4')
        p.add_argument('--precision', type=int, default=None, help='working precision in bits')
        p.add_argument('--cache', type=str, default=None, help='cache directory')
        p.add_argument('--jobs', type=int, default=None, help='worker threads for coefficient jobs')

    compute = sub.add_parser('compute', help='compute Fourier coefficient tables')
    job_options(compute)
    compute.add_argument('--output', type=str, default=None, help='write the JSON document here')
    compute.add_argument('--no-cache', action='store_true', help='bypass the coefficient cache')

    verify = sub.add_parser('verify', help='run property suites against the oracles')
    job_options(verify)
    verify.add_argument('--suite', type=str, default='all', help=f"one of {', '.join(SUITES)}, all")
    verify.add_argument('--cmax', type=int, default=None, help='oracle truncation')

    analytics = sub.add_parser('analytics', help='summarise the run log')
    analytics.add_argument('--export', type=str, default=None, help='also write the report to this file')
    return parser


def _load(args) -> JobConfig:
    config = load_config(args.config)
    overrides = {"mode": args.mode, "n_max": args.nmax, "precision_bits": args.precision,
                 "cache_dir": args.cache, "jobs": args.jobs}
    if getattr(args, "cmax", None) is not None:
        overrides["c_max"] = args.cmax
    return config.with_overrides(**overrides)


def _compute(args, logger: RunLogger) -> int:
    started = time.perf_counter()
    config = _load(args)
    cli = EisensteinCLI(config, logger, use_cache=not args.no_cache)
    text, hit = cli.run_compute()
    if args.output:
        with open(args.output, 'w', encoding='utf-8') as f:
            f.write(text)
        status(f"✓ Wrote {args.output}")
    else:
        sys.stdout.write(text)
    mode_used = json.loads(text)["metadata"]["mode_used"]
    logger.log_run('compute', config.content_hash(), mode_used, 'ok', time.perf_counter() - started, hit,
                   label=f"{config.lattice} k={format_fraction(config.weight)}")
    return EXIT_OK


def _verify(args, logger: RunLogger) -> int:
    if args.suite not in SUITES + ('all',):
        raise ConfigError({"suite": f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}, all"})
    started = time.perf_counter()
    config = _load(args)
    cli = EisensteinCLI(config, logger, use_cache=False)
    results = cli.run_verify(args.suite)
    counts = summarize(results)
    report = {"suite": args.suite, "summary": counts, "results": [r.as_json() for r in results]}
    sys.stdout.write(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    failures = [r.name for r in results if not r.passed]
    if counts["failed"]:
        code, state = EXIT_VERIFICATION_FAILED, 'verification_failed'
    elif counts["budget_exceeded"]:
        code, state = EXIT_BUDGET, 'budget_exceeded'
    else:
        code, state = EXIT_OK, 'ok'
    logger.log_run('verify', config.content_hash(), config.mode, state, time.perf_counter() - started,
                   failures=failures, label=f"{args.suite} {config.lattice}")
    return code


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    logger = RunLogger(args.log_file)

    if args.command == 'analytics':
        logger.print_analytics()
        if args.export:
            logger.export_analytics_report(args.export)
        return EXIT_OK

    try:
        if args.command == 'compute':
            return _compute(args, logger)
        return _verify(args, logger)
    except ConfigError as e:
        status(f"ERROR: invalid configuration: {e}")
        logger.log_run(args.command, status='usage_error', failures=sorted(e.problems))
        return EXIT_USAGE
    except (ContractViolation, ExactModeUnavailable) as e:
        status(f"ERROR: {e}")
        if isinstance(e, ExactModeUnavailable):
            status("Exact mode is unavailable for this job; rerun with --mode auto or --mode numeric.")
        logger.log_run(args.command, status='usage_error')
        return EXIT_USAGE
    except BudgetExceededError as e:
        status(f"ERROR: budget exceeded: {e}")
        logger.log_run(args.command, status='budget_exceeded')
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
