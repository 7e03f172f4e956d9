"""Command-line entry point: preprocess | synthesize | train | generate | rerank | evaluate.

Every subcommand accepts ``--config FILE``, a flat ``key = value`` file whose
keys are the long option names (dashes or underscores). Flags given on the
command line win over the file. For ``train``, keys naming a model or
schedule field (``hidden_dim``, ``learning_rate`` ...) override the preset.

Exit status: 0 success, 1 usage error, 2 data error, 3 training divergence.
All inputs are read and validated before any output file is written.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .corpus import (
    CHAR,
    E2E,
    WEBNLG,
    WORD,
    DataError,
    MRParseError,
    build_vocab,
    detokenize,
    join_symbols,
    load_e2e_csv,
    load_webnlg_xml,
    parse_e2e_mr,
    preprocess_inputs,
    preprocess_instances,
    preprocess_pair,
    read_corpus,
    relexicalize,
    serialize_input,
    symbols_of,
    write_corpus,
)
from .metrics import diversity_stats, drop_one_reference, leave_one_out_human_eval
from .metrics.report import (
    correct_at_n,
    evaluate,
    format_kv,
    format_nbest,
    format_table,
    read_blocks,
    read_lines,
    read_nbest,
)
from .prng import SeededPrng
from .rerank import rerank
from .seq2seq import (
    CheckpointError,
    TrainingDiverged,
    apply_overrides,
    beam_search,
    get_preset,
    load_checkpoint,
    save_checkpoint,
    train,
)
from .seq2seq.config import to_dict
from .templates import LexiconError, SynthesisConfig, default_lexicon, lexicon_product, synthesize_corpus
from .templates import AttributeLexicon, to_training_pairs

log = logging.getLogger("d2tnlg")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DIVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------- config file

def read_config_file(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment line."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise UsageError(f"{path}:{n}: expected 'key = value'")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _parse_set(items):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects key=value, got {item!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _config_value(action, key, value):
    if action.nargs == 0:  # store_true flag
        if value.lower() in ("1", "true", "yes"):
            return True
        if value.lower() in ("0", "false", "no"):
            return False
        raise UsageError(f"config key {key!r}: not a boolean: {value!r}")
    try:
        return action.type(value) if action.type else value
    except ValueError:
        raise UsageError(f"config key {key!r}: invalid value {value!r}") from None


def _apply_config(args, defaults, allow_extra=False):
    """Fill unset options from the config file, then from ``defaults``.
    Returns the config keys that are not options of the subcommand; those are
    a usage error unless ``allow_extra``."""
    extra = {}
    if getattr(args, "config", None):
        actions = {a.dest: a for a in args._parser._actions}
        for key, value in read_config_file(args.config).items():
            if key in actions and key not in ("config", "help"):
                if getattr(args, key) is None:
                    setattr(args, key, _config_value(actions[key], key, value))
            else:
                extra[key] = value
    if extra and not allow_extra:
        raise UsageError(f"unknown config key(s) for {args.command}: {', '.join(sorted(extra))}")
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return extra


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _log_resolved(args, **more):
    resolved = {k: v for k, v in vars(args).items() if k not in ("func", "_parser")}
    resolved.update(more)
    log.info("resolved config: %s", json.dumps(resolved, sort_keys=True, default=str))


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit(text, out_path=None):
    print(text)
    if out_path:
        _write_text(out_path, text + "\n")


def _read_mrs(path):
    mrs = []
    for n, line in enumerate(read_lines(path), 1):
        if not line.strip():
            continue
        try:
            mrs.append(parse_e2e_mr(line))
        except MRParseError as exc:
            raise DataError(f"{path}:{n}: {exc}") from None
    return mrs


def _lexicon(path):
    return AttributeLexicon.load(path) if path else default_lexicon()


# ----------------------------------------------------------------- commands

def cmd_preprocess(args):
    _apply_config(args, {"dataset": None, "mode": WORD, "input": None, "out_dir": None})
    _require(args, "dataset", "input", "out_dir")
    if args.dataset not in (E2E, WEBNLG):
        raise UsageError(f"--dataset must be {E2E} or {WEBNLG}, got {args.dataset!r}")
    if args.mode not in (WORD, CHAR):
        raise UsageError(f"--mode must be {WORD} or {CHAR}, got {args.mode!r}")
    _log_resolved(args)
    instances = load_e2e_csv(args.input) if args.dataset == E2E else load_webnlg_xml(args.input)
    pairs = preprocess_instances(instances, args.mode)
    if not pairs:
        raise DataError(f"{args.input}: no input/reference pairs")
    vin, vout, stats = build_vocab([(p.source, p.target) for p in pairs], args.mode)
    table = stats.table(f"{args.dataset} {args.mode} statistics")

    os.makedirs(args.out_dir, exist_ok=True)
    write_corpus(os.path.join(args.out_dir, "corpus.tsv"), pairs)
    # one line per instance, aligned with references.txt and mrs.txt
    write_corpus(os.path.join(args.out_dir, "inputs.tsv"), preprocess_inputs(instances, args.mode))
    vin.save(os.path.join(args.out_dir, "vocab.input.json"))
    vout.save(os.path.join(args.out_dir, "vocab.output.json"))
    _write_text(os.path.join(args.out_dir, "stats.txt"), table + "\n")
    _write_text(os.path.join(args.out_dir, "references.txt"),
                "\n\n".join("\n".join(inst.references) for inst in instances) + "\n")
    if args.dataset == E2E:
        _write_text(os.path.join(args.out_dir, "mrs.txt"),
                    "".join(", ".join(f"{a}[{v}]" for a, v in inst.mr.slots) + "\n" for inst in instances))
    else:
        _write_text(os.path.join(args.out_dir, "inputs.txt"),
                    "".join(serialize_input(inst.mr) + "\n" for inst in instances))
    print(table)
    return EXIT_OK


def cmd_synthesize(args):
    _apply_config(args, {"inputs": None, "from_lexicon": False, "templates": None, "out": None,
                         "lexicon": None})
    _require(args, "templates", "out")
    if not args.inputs and not args.from_lexicon:
        raise UsageError("give --inputs FILE or --from-lexicon")
    try:
        config = SynthesisConfig.from_flag(args.templates)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _log_resolved(args)
    lexicon = _lexicon(args.lexicon)
    mrs = list(lexicon_product(lexicon)) if args.from_lexicon else _read_mrs(args.inputs)
    if not mrs:
        raise DataError("synthesize: no inputs")
    try:
        synth = synthesize_corpus(mrs, config, lexicon)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    write_corpus(args.out, to_training_pairs(synth))
    print(f"wrote {len(synth)} pairs from {len(mrs)} inputs ({args.templates}, "
          f"repetition {config.repetition_factor})")
    return EXIT_OK


def _encode(pairs, vin, vout, mode):
    return [(vin.encode(symbols_of(p.source, mode)), vout.encode(symbols_of(p.target, mode))) for p in pairs]


def cmd_train(args):
    extra = _apply_config(args, {"corpus": None, "dev": None, "preset": None, "seed": None, "out": None,
                                 "log": None}, allow_extra=True)
    _require(args, "corpus", "dev", "preset", "out")
    if args.seed is None:
        raise UsageError("--seed is mandatory for train")
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    try:
        preset = get_preset(args.preset)
        overrides = {**extra, **_parse_set(args.set)}
        preset = apply_overrides(preset, overrides)
    except (KeyError, ValueError) as exc:
        raise UsageError(exc.args[0] if exc.args else str(exc)) from None
    _log_resolved(args, model=to_dict(preset.model), schedule=to_dict(preset.schedule),
                  beam_size=preset.beam_size)
    log.info("seed %d", args.seed)
    mode = preset.model.mode
    train_pairs, dev_pairs = read_corpus(args.corpus), read_corpus(args.dev)
    if not train_pairs or not dev_pairs:
        raise DataError("train: empty training or development corpus")
    vin, vout, _ = build_vocab([(p.source, p.target) for p in train_pairs], mode)
    result = train(_encode(train_pairs, vin, vout, mode), _encode(dev_pairs, vin, vout, mode),
                   len(vin), len(vout), preset.model, preset.schedule, args.seed)
    lines = ["epoch\ttrain_loss\tdev_perplexity\tlearning_rate"]
    lines += [f"{r.epoch}\t{r.train_loss:.6f}\t{r.dev_perplexity:.6f}\t{r.learning_rate:.6g}" for r in result.log]
    save_checkpoint(args.out, result.model, vin, vout, seed=args.seed,
                    extra={"preset": args.preset, "beam_size": preset.beam_size,
                           "schedule": to_dict(preset.schedule), "best_epoch": result.best_epoch})
    if args.log:
        _write_text(args.log, "\n".join(lines) + "\n")
    print("\n".join(lines))
    print(f"best epoch {result.best_epoch} dev perplexity {result.best_perplexity:.4f}")
    return EXIT_OK


def _generation_inputs(args, mode):
    """``[(source, record)]`` from a preprocessed corpus or an MR file.

    Corpus lines repeating an earlier (source, delexicalisation record) are
    further references of the same instance and are decoded once.
    """
    if args.corpus:
        seen, out = set(), []
        for p in read_corpus(args.corpus):
            key = (p.source, p.record.encode())
            if key not in seen:
                seen.add(key)
                out.append((p.source, p.record))
        return out
    out = []
    for mr in _read_mrs(args.mrs):
        p = preprocess_pair(mr, "", mode)
        out.append((p.source, p.record))
    return out


def cmd_generate(args):
    _apply_config(args, {"checkpoint": None, "corpus": None, "mrs": None, "beam": None, "n_best": 1,
                         "relex": False, "max_len": None, "out": None})
    _require(args, "checkpoint", "out")
    if bool(args.corpus) == bool(args.mrs):
        raise UsageError("give exactly one of --corpus or --mrs")
    ckpt = load_checkpoint(args.checkpoint)
    mode = ckpt.config.mode
    beam = args.beam or (ckpt.extra or {}).get("beam_size") or 1
    if args.n_best < 1 or args.n_best > beam:
        raise UsageError(f"--n-best must lie in [1, beam={beam}]")
    max_len = args.max_len or (80 if mode == WORD else 400)
    _log_resolved(args, beam=beam, max_len=max_len, mode=mode)
    inputs = _generation_inputs(args, mode)
    if not inputs:
        raise DataError("generate: no inputs")
    blocks = []
    for src, record in inputs:
        ids = ckpt.src_vocab.encode(symbols_of(src, mode))
        hyps = beam_search(ckpt.model, ids, beam, max_len)[:args.n_best]
        scored = []
        for h in hyps:
            syms = ckpt.tgt_vocab.decode(h.token_ids)
            text = detokenize(syms) if mode == WORD else join_symbols(syms, mode)
            if args.relex:
                text = relexicalize(text, record)
            scored.append((h.log_prob, text))
        blocks.append(scored)
    if args.n_best == 1:
        _write_text(args.out, "".join(b[0][1] + "\n" for b in blocks))
    else:
        _write_text(args.out, "\n\n".join("\n".join(format_nbest(b)) for b in blocks) + "\n")
    print(f"wrote {len(blocks)} outputs (beam {beam}, n-best {args.n_best})")
    return EXIT_OK


def cmd_rerank(args):
    _apply_config(args, {"mrs": None, "nbest": None, "out": None, "lexicon": None})
    _require(args, "mrs", "nbest", "out")
    _log_resolved(args)
    mrs = _read_mrs(args.mrs)
    blocks = read_nbest(args.nbest)
    if len(mrs) != len(blocks):
        raise DataError(f"alignment error: {len(mrs)} MRs but {len(blocks)} hypothesis blocks")
    lexicon = _lexicon(args.lexicon)
    out = [format_nbest(rerank(mr, hyps, text_of=lambda h: h[1], lexicon=lexicon)) for mr, hyps in zip(mrs, blocks)]
    _write_text(args.out, "\n\n".join("\n".join(b) for b in out) + "\n")
    print(f"reranked {len(out)} blocks")
    return EXIT_OK


def _check_aligned(hyps, refs):
    if len(hyps) != len(refs):
        n = min(len(hyps), len(refs))
        raise DataError(f"misaligned files: instance {n} has "
                        f"{'no hypothesis' if len(hyps) < len(refs) else 'no references'} "
                        f"({len(hyps)} hypotheses, {len(refs)} reference blocks)")
    for i, r in enumerate(refs):
        if not r:
            raise DataError(f"misaligned files: instance {i} has no references")


def cmd_evaluate(args):
    _apply_config(args, {"hyps": None, "nbest": None, "refs": None, "train_refs": None, "diversity": False,
                         "human": False, "drop_one_ref": False, "mrs": None, "seed": 0, "out": None,
                         "lexicon": None})
    if args.diversity and not args.train_refs:
        raise UsageError("--diversity requires --train-refs")
    if args.human and not args.refs:
        raise UsageError("--human requires --refs")
    if not args.human and not (args.hyps or args.nbest):
        raise UsageError("give --hyps or --nbest (or --human with --refs)")
    if args.mrs and not args.nbest:
        raise UsageError("--mrs (correctness at n) requires --nbest")
    _log_resolved(args)
    sections = []
    refs = read_blocks(args.refs) if args.refs else None
    if args.human:
        bleu, rouge = leave_one_out_human_eval(refs)
        rows = [("BLEU mean", f"{bleu.mean:.2f}"), ("BLEU sd", f"{bleu.sd:.2f}"),
                ("ROUGE-L mean", f"{rouge.mean:.2f}"), ("ROUGE-L sd", f"{rouge.sd:.2f}")]
        sections.append(("human (leave-one-out)", "human_", rows))
    nbest = read_nbest(args.nbest) if args.nbest else None
    hyps = read_lines(args.hyps) if args.hyps else ([b[0][1] if b else "" for b in nbest] if nbest else None)
    if hyps is not None and hyps and hyps[-1] == "" and refs is not None and len(hyps) == len(refs) + 1:
        hyps = hyps[:-1]
    if hyps is not None and refs is not None:
        _check_aligned(hyps, refs)
        use_refs = refs
        if args.drop_one_ref:
            use_refs = drop_one_reference(refs, SeededPrng(args.seed).stream("refdrop"))
        sections.append(("overlap", "", evaluate(hyps, use_refs).rows()))
    if args.diversity:
        train_refs = [line for line in read_lines(args.train_refs) if line.strip()]
        sections.append(("diversity", "", diversity_stats(hyps or [], train_refs).rows()))
    if args.mrs:
        mrs = _read_mrs(args.mrs)
        if len(mrs) != len(nbest):
            raise DataError(f"misaligned files: {len(mrs)} MRs but {len(nbest)} hypothesis blocks "
                            f"(first unmatched instance {min(len(mrs), len(nbest))})")
        cn = correct_at_n(mrs, [[t for _, t in b] for b in nbest], lexicon=_lexicon(args.lexicon))
        sections.append(("correct at n", "", [(f"c@{n}", f"{v:.2f}") for n, v in cn.items()]))
    if not sections:
        raise UsageError("nothing to evaluate: give --refs, --diversity or --mrs")
    text = "\n\n".join(format_table(title, rows) for title, _, rows in sections)
    text += "\n\n" + "\n".join(format_kv(prefix, rows) for _, prefix, rows in sections)
    _emit(text, args.out)
    return EXIT_OK


# ------------------------------------------------------------------- parser

def build_parser():
    p = _Parser(prog="d2tnlg", description="Data-to-text generation toolkit.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="flat key = value file; command-line flags win")
        sp.set_defaults(func=func, _parser=sp)
        return sp

    sp = add("preprocess", cmd_preprocess, "lowercase, delexicalise, tokenise; print corpus statistics")
    sp.add_argument("--dataset", help="e2e (CSV) or webnlg (XML)")
    sp.add_argument("--mode", help="word or char")
    sp.add_argument("--input", help="raw dataset file")
    sp.add_argument("--out-dir")

    sp = add("synthesize", cmd_synthesize, "template training data from MRs")
    sp.add_argument("--inputs", help="one E2E MR per line")
    sp.add_argument("--from-lexicon", action="store_true", default=None,
                    help="use every attribute combination of the lexicon")
    sp.add_argument("--templates", help="t1 | t2 | t1t2")
    sp.add_argument("--lexicon", help="lexicon TSV (default: bundled)")
    sp.add_argument("--out")

    sp = add("train", cmd_train, "train a model from a preset")
    sp.add_argument("--corpus")
    sp.add_argument("--dev")
    sp.add_argument("--preset")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a preset field")
    sp.add_argument("--out", help="checkpoint path")
    sp.add_argument("--log", help="epoch log (TSV)")

    sp = add("generate", cmd_generate, "beam-search decoding")
    sp.add_argument("--checkpoint")
    sp.add_argument("--corpus", help="preprocessed corpus (distinct inputs are decoded)")
    sp.add_argument("--mrs", help="one E2E MR per line")
    sp.add_argument("--beam", type=int, help="beam size (default: from the checkpoint's preset)")
    sp.add_argument("--n-best", type=int)
    sp.add_argument("--relex", action="store_true", default=None, help="restore delexicalised values")
    sp.add_argument("--max-len", type=int)
    sp.add_argument("--out")

    sp = add("rerank", cmd_rerank, "rule-based reranking of n-best lists")
    sp.add_argument("--mrs")
    sp.add_argument("--nbest")
    sp.add_argument("--lexicon")
    sp.add_argument("--out")

    sp = add("evaluate", cmd_evaluate, "BLEU/ROUGE-L, diversity, human upper bound, correctness at n")
    sp.add_argument("--hyps", help="one hypothesis per line")
    sp.add_argument("--nbest", help="n-best blocks (top-1 is scored when --hyps is absent)")
    sp.add_argument("--refs", help="reference blocks separated by blank lines")
    sp.add_argument("--train-refs", help="training references, one per line")
    sp.add_argument("--diversity", action="store_true", default=None)
    sp.add_argument("--human", action="store_true", default=None, help="leave-one-out on the references")
    sp.add_argument("--drop-one-ref", action="store_true", default=None,
                    help="drop one random reference per instance before scoring")
    sp.add_argument("--mrs", help="MRs for correctness at n (needs --nbest)")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--lexicon")
    sp.add_argument("--out", help="also write the report here")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or an argparse usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"d2tnlg {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrainingDiverged as exc:
        print(f"d2tnlg {args.command}: training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (DataError, MRParseError, CheckpointError, LexiconError, OSError, ValueError) as exc:
        print(f"d2tnlg {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
