"""Command-line front end.

Subcommands: ``encode`` (images to spike files), ``cost-sweep`` (comparator
bank cost CSV), ``verify-gamma`` (generator/controller functional checks),
``train`` / ``infer`` (simulation runs driven by a config file), ``report``
(histogram, purity, savings tables from a saved run).

Exit codes: 0 success, 1 validation or config error, 2 a verification
scenario failed. Every command is deterministic given its flags and seed;
re-running writes byte-identical artifacts.

The config file is flat ``key = value`` text, ``#`` starts a comment:

    images      = data/train-images.idx
    labels      = data/train-labels.idx
    layers      = 64x10
    period      = 16
    threshold   = 2744
    encoder     = posneg
    mode        = relaxed
    seed        = 7
    epochs      = 3
"""

from __future__ import annotations

import argparse
import pathlib
import sys
from typing import Optional

from . import costmodel, dataio, gamma, metrics, network
from .encode import INF, Linear, Log, PosNeg, encode_image
from .stdp import StdpParams


class ConfigError(ValueError):
    """Bad config file contents, with file/line context in the message."""


_CONFIG_KEYS = {
    "images",
    "labels",
    "train_images",
    "train_labels",
    "test_images",
    "test_labels",
    "limit",
    "layers",
    "period",
    "threshold",
    "encoder",
    "pixel_threshold",
    "mode",
    "seed",
    "epochs",
    "u_capture",
    "u_backoff",
    "u_search",
    "u_quiet",
    "w_max",
}


def parse_config(path: pathlib.Path) -> dict[str, str]:
    """Read a flat key = value file, rejecting unknown or repeated keys."""
    values: dict[str, str] = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: key {key!r} repeated")
        if not val:
            raise ConfigError(f"{path}:{lineno}: key {key!r} has no value")
        values[key] = val
    return values


def _config_int(cfg: dict[str, str], key: str, default: int) -> int:
    if key not in cfg:
        return default
    try:
        return int(cfg[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: {cfg[key]!r} is not an integer") from None


def _parse_layers(text: str) -> tuple[tuple[int, int], ...]:
    layers = []
    for part in text.split(","):
        part = part.strip()
        try:
            cols, _, neurons = part.partition("x")
            layers.append((int(cols), int(neurons)))
        except ValueError:
            raise ConfigError(
                f"key 'layers': {part!r} is not COLSxNEURONS"
            ) from None
    return tuple(layers)


def _make_encoder(cfg: dict[str, str], period: int):
    name = cfg.get("encoder", "posneg")
    if name == "posneg":
        return PosNeg(threshold=_config_int(cfg, "pixel_threshold", 127))
    if name == "linear":
        return Linear(period=period)
    if name == "log":
        return Log(period=period)
    raise ConfigError(f"key 'encoder': unknown encoder {name!r}")


def _network_config(cfg: dict[str, str], pixel_count: int) -> network.NetworkConfig:
    period = _config_int(cfg, "period", 16)
    if "layers" not in cfg:
        raise ConfigError("key 'layers' is required")
    threshold_text = cfg.get("threshold", "2744")
    parts = [p.strip() for p in threshold_text.split(",")]
    try:
        threshold = int(parts[0]) if len(parts) == 1 else tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"key 'threshold': {threshold_text!r} is not an integer list") from None
    mode_text = cfg.get("mode", "relaxed")
    if mode_text not in ("fixed", "relaxed"):
        raise ConfigError(f"key 'mode': must be fixed or relaxed, got {mode_text!r}")
    params = StdpParams(
        u_capture=_config_int(cfg, "u_capture", 2),
        u_backoff=_config_int(cfg, "u_backoff", 2),
        u_search=_config_int(cfg, "u_search", 2),
        u_quiet=_config_int(cfg, "u_quiet", 1),
        w_max=_config_int(cfg, "w_max", 7),
    )
    try:
        return network.NetworkConfig(
            layers=_parse_layers(cfg["layers"]),
            pixel_count=pixel_count,
            period=period,
            threshold=threshold,
            encoder=_make_encoder(cfg, period),
            stdp_params=params,
            mode=network.Mode(mode_text),
            seed=_config_int(cfg, "seed", 0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _load_dataset(
    cfg: dict[str, str], images_keys: tuple[str, ...], labels_keys: tuple[str, ...]
) -> dataio.LabeledDataset:
    img_key = next((k for k in images_keys if k in cfg), None)
    if img_key is None:
        raise ConfigError(f"one of {images_keys} is required")
    with open(cfg[img_key], "rb") as f:
        dataset = dataio.read_idx_images(f)
    lab_key = next((k for k in labels_keys if k in cfg), None)
    if lab_key is not None:
        with open(cfg[lab_key], "rb") as f:
            labels = dataio.read_idx_labels(f)
        dataset = dataio.attach_labels(dataset, labels)
    limit = _config_int(cfg, "limit", 0)
    if limit > 0:
        dataset = dataio.LabeledDataset(images=dataset.images[:limit])
    return dataset


def _cmd_encode(args) -> int:
    with open(args.idx, "rb") as f:
        dataset = dataio.read_idx_images(f)
    if args.labels:
        with open(args.labels, "rb") as f:
            dataset = dataio.attach_labels(dataset, dataio.read_idx_labels(f))
    if args.encoder == "posneg":
        kind = PosNeg(threshold=args.threshold)
    elif args.encoder == "linear":
        kind = Linear(period=args.period)
    else:
        kind = Log(period=args.period)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)

    def render(t) -> str:
        if isinstance(kind, PosNeg):
            # Channel bit: 1 where the spike fires at time 0.
            return "1" if t == 0 else "0"
        return "inf" if t == INF else str(int(t))

    with open(f"{out}_pos.txt", "w") as pos_f, open(f"{out}_neg.txt", "w") as neg_f:
        for img in dataset:
            volley = encode_image(img.pixels, kind)
            pos_f.write(" ".join(render(t) for t in volley.positive) + "\n")
            neg_f.write(" ".join(render(t) for t in volley.negative) + "\n")
    if any(img.label is not None for img in dataset):
        with open(f"{out}_labels.txt", "w") as lab_f:
            for img in dataset:
                lab_f.write(f"{img.label}\n")
    return 0


def _cmd_cost_sweep(args) -> int:
    base = costmodel.ComparatorBankConfig(
        comparator_count=args.comparators,
        clock_frequency=args.frequency,
        pixels_per_image=args.pixels,
    )
    values = [float(v) for v in args.values.split(",") if v.strip()]
    points = costmodel.sweep(args.axis, values, base, costmodel.REFERENCE_UNIT)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as f:
        costmodel.write_sweep_csv(points, f)
    errors = [p for p in points if p.error is not None]
    for p in errors:
        print(f"value {p.value}: {p.error}", file=sys.stderr)
    return 0


def _cmd_verify_gamma(args) -> int:
    results = gamma.verify_scenarios(period=args.period, column_count=args.columns)
    all_ok = True
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{status}  {r.name}: {r.detail}")
        all_ok = all_ok and r.passed
    print(f"{sum(r.passed for r in results)}/{len(results)} scenarios passed")
    return 0 if all_ok else 2


def _write_run_artifacts(net, summary, out_dir: pathlib.Path, with_weights: bool) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "summary.csv", "w") as f:
        network.write_summary_csv(summary, f)
    with open(out_dir / "trace.csv", "w") as f:
        gamma.write_trace_csv(summary.trace, f)
    network.save_summary_npz(summary, out_dir / "summary.npz")
    if with_weights:
        network.save_weights_npz(net, out_dir / "weights.npz")


def _cmd_train(args) -> int:
    cfg = parse_config(pathlib.Path(args.config))
    dataset = _load_dataset(
        cfg, ("train_images", "images"), ("train_labels", "labels")
    )
    if len(dataset) == 0:
        raise ConfigError("training dataset is empty")
    first = dataset[0]
    net = network.TnnNetwork(_network_config(cfg, first.width * first.height))
    summary = net.train(dataset, epochs=_config_int(cfg, "epochs", 1))
    _write_run_artifacts(net, summary, pathlib.Path(args.out), with_weights=True)
    realized, potential = metrics.cycle_savings(summary.trace, net.config.period)
    print(
        f"trained {summary.images} images x {summary.epochs} epochs: "
        f"{summary.gamma_cycles} gamma cycles, {summary.total_clock_cycles} clock steps, "
        f"realized savings {realized:.1%}"
    )
    return 0


def _cmd_infer(args) -> int:
    cfg = parse_config(pathlib.Path(args.config))
    dataset = _load_dataset(
        cfg, ("test_images", "images", "train_images"), ("test_labels", "labels", "train_labels")
    )
    if len(dataset) == 0:
        raise ConfigError("inference dataset is empty")
    first = dataset[0]
    net = network.TnnNetwork(_network_config(cfg, first.width * first.height))
    network.load_weights_npz(net, args.weights)
    summary = net.infer(dataset)
    _write_run_artifacts(net, summary, pathlib.Path(args.out), with_weights=False)
    hist = metrics.spike_histogram(summary)
    mode_t, frac = hist.mode_fraction()
    print(
        f"inferred {summary.images} images: busiest spike time {mode_t} "
        f"({frac:.1%} of outputs), {hist.inf_count} silent"
    )
    return 0


def _cmd_report(args) -> int:
    summary = network.load_summary_npz(args.summary)
    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    hist = metrics.spike_histogram(summary)
    with open(out_dir / "histogram.csv", "w") as f:
        metrics.write_histogram_csv(hist, f)
    (out_dir / "histogram.md").write_text(metrics.histogram_markdown(hist))
    realized, potential = metrics.cycle_savings(summary.trace, summary.trace.period)
    with open(out_dir / "savings.csv", "w") as f:
        metrics.write_savings_csv(realized, potential, f)
    if args.labels:
        with open(args.labels, "rb") as f:
            labels = dataio.read_idx_labels(f)
        report = metrics.purity(summary, labels)
        with open(out_dir / "purity.csv", "w") as f:
            metrics.write_purity_csv(report, f)
        (out_dir / "purity.md").write_text(metrics.purity_markdown(report))
        print(f"purity {report.purity:.4f} over {len(report.groups)} winner groups")
    print(
        f"cycle savings: realized {realized:.2%}, potential {potential:.2%}"
    )
    return 0


class _Parser(argparse.ArgumentParser):
    """Argument errors are validation errors: exit 1, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tnnsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_enc = sub.add_parser("encode", help="encode IDX images into spike files")
    p_enc.add_argument("--idx", required=True, help="IDX image file")
    p_enc.add_argument("--labels", help="optional IDX label file")
    p_enc.add_argument(
        "--encoder", required=True, choices=["posneg", "linear", "log"]
    )
    p_enc.add_argument("--threshold", type=int, default=127, help="posneg pixel threshold")
    p_enc.add_argument("--period", type=int, default=16, help="gamma period for graded codes")
    p_enc.add_argument("--out", required=True, help="output path prefix")
    p_enc.set_defaults(func=_cmd_encode)

    p_cost = sub.add_parser("cost-sweep", help="comparator bank cost CSV")
    p_cost.add_argument(
        "--axis", required=True, choices=list(costmodel.SWEEP_AXES)
    )
    p_cost.add_argument("--values", required=True, help="comma-separated sweep values")
    p_cost.add_argument("--comparators", type=int, default=49)
    p_cost.add_argument("--frequency", type=float, default=1e9)
    p_cost.add_argument("--pixels", type=int, default=784)
    p_cost.add_argument("--out", required=True, help="output CSV path")
    p_cost.set_defaults(func=_cmd_cost_sweep)

    p_ver = sub.add_parser("verify-gamma", help="run the generator/controller checks")
    p_ver.add_argument("--period", type=int, default=16)
    p_ver.add_argument("--columns", type=int, default=3)
    p_ver.set_defaults(func=_cmd_verify_gamma)

    p_train = sub.add_parser("train", help="train a network from a config file")
    p_train.add_argument("--config", required=True)
    p_train.add_argument("--out", required=True, help="output directory")
    p_train.set_defaults(func=_cmd_train)

    p_inf = sub.add_parser("infer", help="run inference with saved weights")
    p_inf.add_argument("--config", required=True)
    p_inf.add_argument("--weights", required=True, help="weights npz from train")
    p_inf.add_argument("--out", required=True, help="output directory")
    p_inf.set_defaults(func=_cmd_infer)

    p_rep = sub.add_parser("report", help="tables from a saved run summary")
    p_rep.add_argument("--summary", required=True, help="summary npz from train/infer")
    p_rep.add_argument("--labels", help="optional IDX label file for purity")
    p_rep.add_argument("--out", required=True, help="output directory")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
