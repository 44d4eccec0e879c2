"""Command line entry point: ``jobrec {synth,train,evaluate,stats}``.

Every setting can come from ``--config`` (INI-style), an ``EMBREC_<KEY>``
environment variable, or a ``--<key>`` flag; flags win over the environment,
which wins over the file.

Exit codes: 0 success, 1 input error, 2 config error, 3 internal failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import corpus, harness
from .errors import ConfigError, DataError, StageError

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3


def _add_setting_flags(parser, sections):
    for section in sections:
        group = parser.add_argument_group(section)
        for key in harness.SECTIONS[section]:
            group.add_argument(f"--{key}", dest=key, default=None, metavar="VALUE")


def build_parser():
    parser = argparse.ArgumentParser(prog="jobrec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic jobs/interactions pair")
    p.add_argument("--config")
    _add_setting_flags(p, ["paths", "synth"])
    p.add_argument("--seed", default=None)

    p = sub.add_parser("train", help="train one embedding model and save it")
    p.add_argument("--config")
    p.add_argument("--dim", type=int, default=None, help="embedding dimension (default: first of --dims)")
    _add_setting_flags(p, ["paths", "train"])
    p.add_argument("--dims", default=None)
    p.add_argument("--seed", default=None)

    p = sub.add_parser("evaluate", help="run the full experiment and write the report CSV")
    p.add_argument("--config")
    _add_setting_flags(p, ["paths", "experiment", "train", "bll"])
    p.add_argument("--out", dest="output_alias", default=None, help="alias of --output")

    p = sub.add_parser("stats", help="print dataset statistics before and after the split")
    p.add_argument("--config")
    _add_setting_flags(p, ["paths"])
    p.add_argument("--min_history", default=None)
    p.add_argument("--holdout", default=None)
    return parser


def _overrides(args):
    skip = {"command", "config", "verbose", "dim", "output_alias"}
    out = {k: v for k, v in vars(args).items() if k not in skip}
    if getattr(args, "output_alias", None):
        out["output"] = args.output_alias
    return out


def _cmd_synth(settings):
    cfg = harness.synth_config(settings)
    exp = {k: settings.get(k, getattr(harness.ExperimentConfig, k)) for k in ("jobs", "interactions")}
    result = harness.synth(cfg, exp["jobs"], exp["interactions"], settings.get("users_file"))
    print(f"wrote {result.jobs_path}, {result.interactions_path} and {result.users_path}")


def _cmd_train(settings, dim):
    cfg = harness.experiment_config(settings)
    dim = dim or cfg.dims[0]
    if not cfg.model:
        raise ConfigError("train needs a model path (--model)")
    with harness.stage("load_jobs"):
        jobs = corpus.load_jobs(cfg.jobs)
    model = harness.train_models(jobs, cfg, dims=[dim])[dim]
    print(f"trained d={dim} on {len(model.job_ids)} jobs, final mean loss "
          f"{model.epoch_losses[-1]:.4f}; saved to {cfg.model_path(dim)}")


def _cmd_evaluate(settings):
    cfg = harness.experiment_config(settings)
    result = harness.run_experiment(cfg)
    print(result.table)
    print(f"\nN_A = {result.report.target_novelty:.4f}; hybrid uses BLL d={result.hybrid_dim}; "
          f"report written to {cfg.output} ({result.seconds:.1f}s)")


def _cmd_stats(settings):
    cfg = harness.experiment_config(settings)
    data, parts = harness.load_split(cfg)
    print(f"all:   {corpus.stats(data)}")
    print(f"train: {corpus.stats(parts.train)}")
    print(f"test users: {len(parts.test)}  held-out jobs: {sum(len(v) for v in parts.test.values())}")
    if data.rejected:
        print(f"rejected rows: {len(data.rejected)}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = harness.resolve_settings(args.config, _overrides(args))
        if args.command == "synth":
            _cmd_synth(settings)
        elif args.command == "train":
            _cmd_train(settings, args.dim)
        elif args.command == "evaluate":
            _cmd_evaluate(settings)
        else:
            _cmd_stats(settings)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        print(f"error in stage {exc}", file=sys.stderr)
        if isinstance(exc.cause, ConfigError):
            return EXIT_CONFIG
        if isinstance(exc.cause, (DataError, OSError)):
            return EXIT_INPUT
        return EXIT_INTERNAL
    except (DataError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
