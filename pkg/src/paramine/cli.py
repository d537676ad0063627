"""Command-line front-end wiring the pipeline modules together.

All subcommands read an optional JSON config file; explicit flags win
over config values.  Data goes to files or stdout, progress to stderr.
Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import concurrent.futures
import json
import os
import sys
from pathlib import Path

import click

from . import annotate, corpus, embeddings, identify, metrics, report, textnorm
from . import phrasal
from .phrasal import rank as rank_mod


def _err(msg):
    click.echo(msg, err=True)


def _load_config(path):
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _cfg(ctx, key, flag_value, default):
    """Flag > config > default."""
    if flag_value is not None:
        return flag_value
    return ctx.obj.get("config", {}).get(key, default)


def _skip_existing(ctx, path):
    if path and Path(path).exists() and not ctx.obj.get("force"):
        _err("output %s exists; skipping (use --force to overwrite)" % path)
        return True
    return False


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="JSON config file; flags override it.")
@click.option("--force", is_flag=True, help="Overwrite existing outputs.")
@click.option("--jobs", type=int, default=None,
              help="Data-parallel width (default: available cores).")
@click.pass_context
def cli(ctx, config_path, force, jobs):
    ctx.obj = {
        "config": _load_config(config_path),
        "force": force,
        "jobs": jobs or os.cpu_count() or 1,
    }


# ----------------------------------------------------------------- corpus

def _tweet_record(t):
    return {"id": t.id, "author": t.author, "text": t.text,
            "urls": list(t.urls), "timestamp": t.timestamp,
            "retweeted": t.is_auto_retweet}


def _write_jsonl(records, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def _read_tweets_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        result = corpus.ingest_jsonl(fh)
    return result


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--resolver", "resolver_path", type=click.Path(exists=True),
              default=None, help="JSON map of short URL -> canonical URL.")
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def ingest(ctx, input_path, resolver_path, output_path):
    """Ingest tweets from line-delimited JSON and resolve URLs."""
    if _skip_existing(ctx, output_path):
        return
    result = _read_tweets_jsonl(input_path)
    resolver = {}
    if resolver_path:
        with open(resolver_path, encoding="utf-8") as fh:
            resolver = json.load(fh)
    tweets = [corpus.resolve_urls(t, resolver) for t in result.tweets]
    _write_jsonl((_tweet_record(t) for t in tweets), output_path)
    _err("ingested %d tweets, skipped %d lines"
         % (len(tweets), result.skip_count))
    for lineno, reason in result.skipped:
        _err("  line %d: %s" % (lineno, reason))


def _group_record(g):
    return {"url": g.url, "seed_account": g.seed_account,
            "tweets": [_tweet_record(t) for t in g.tweets]}


def _read_groups_jsonl(path):
    groups = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            tweets = tuple(corpus.Tweet(
                id=t["id"], author=t.get("author", ""), text=t["text"],
                urls=tuple(t.get("urls", [])), timestamp=t.get("timestamp", 0),
                is_auto_retweet=t.get("retweeted", False))
                for t in rec["tweets"])
            groups.append(corpus.UrlGroup(url=rec["url"], tweets=tweets,
                                          seed_account=rec.get("seed_account")))
    return groups


@cli.command("filter")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--meta", "meta_path", type=click.Path(exists=True), default=None)
@click.option("--seed-accounts", "seeds_path", type=click.Path(exists=True),
              default=None, help="File with one seed account per line.")
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def filter_cmd(ctx, input_path, meta_path, seeds_path, output_path):
    """Group tweets by URL and filter manual retweets."""
    if _skip_existing(ctx, output_path):
        return
    result = _read_tweets_jsonl(input_path)
    seeds = ()
    if seeds_path:
        seeds = [ln.strip() for ln in open(seeds_path, encoding="utf-8")
                 if ln.strip()]
    meta = textnorm.load_page_meta(meta_path) if meta_path else {}
    groups = corpus.group_by_url(result.tweets, seed_accounts=seeds)
    filtered = [textnorm.filter_group(g, meta.get(g.url)) for g in groups]
    filtered = [g for g in filtered if len(g.tweets) >= 2]
    _write_jsonl((_group_record(g) for g in filtered), output_path)
    _err("kept %d groups (from %d)" % (len(filtered), len(groups)))


@cli.command()
@click.option("--groups", "groups_path", required=True, type=click.Path(exists=True))
@click.option("--strategy", type=click.Choice([corpus.ORIGINAL_VS_REST,
                                               corpus.ALL_PAIRS]),
              default=corpus.ORIGINAL_VS_REST)
@click.option("--max-candidates", type=int, default=10)
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def pairs(ctx, groups_path, strategy, max_candidates, output_path):
    """Generate candidate sentence pairs from URL groups."""
    if _skip_existing(ctx, output_path):
        return
    groups = _read_groups_jsonl(groups_path)
    n = 0
    with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
        for group in groups:
            for sp in corpus.generate_pairs(group, max_candidates=max_candidates,
                                            strategy=strategy):
                fh.write("%s\t%s\t%s\t%s\n" % (sp.pair_id, sp.url or "",
                                               sp.s1.replace("\t", " "),
                                               sp.s2.replace("\t", " ")))
                n += 1
    _err("wrote %d pairs" % n)


def _read_pairs_tsv(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            pair_id, url, s1, s2 = line.split("\t")
            out.append(corpus.SentencePair(pair_id=pair_id, url=url or None,
                                           s1=s1, s2=s2))
    return out


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--outdir", required=True, type=click.Path())
@click.pass_context
def stats(ctx, corpus_path, outdir):
    """PINC / Jaccard histograms (CSV + figure) for a labeled corpus."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    dataset, skipped = corpus.import_labeled_tsv(corpus_path)
    pincs, jaccards = [], []
    for lp in dataset.pairs:
        t1 = textnorm.token_surfaces(lp.pair.s1)
        t2 = textnorm.token_surfaces(lp.pair.s2)
        if t1 and t2:
            pincs.append(metrics.pinc(t1, t2))
            jaccards.append(metrics.jaccard(t1, t2))
    report.write_histogram(pincs, outdir / "pinc_hist",
                           title="PINC distribution", xlabel="PINC")
    report.write_histogram(jaccards, outdir / "jaccard_hist",
                           title="Jaccard distribution", xlabel="Jaccard")
    _err("pairs: %d (skipped rows: %d); mean PINC %.4f, mean Jaccard %.4f"
         % (len(dataset.pairs), len(skipped),
            sum(pincs) / len(pincs) if pincs else 0.0,
            sum(jaccards) / len(jaccards) if jaccards else 0.0))


# ----------------------------------------------------------- identification

def _build_spec(ctx, mode, embeddings_path, factors_path, train_dataset=None):
    mode = identify.FeatureMode(mode)
    table = None
    factor_model = None
    if embeddings_path:
        table = embeddings.load_embeddings(embeddings_path)
    if mode in (identify.FeatureMode.VEC, identify.FeatureMode.SIM,
                identify.FeatureMode.LEX_VEC, identify.FeatureMode.LEX_SIM):
        if factors_path and Path(factors_path).exists():
            factor_model = embeddings.load_factor_model(factors_path)
        elif train_dataset is not None:
            cfg = ctx.obj.get("config", {})
            sentences = []
            for lp in train_dataset.pairs:
                sentences.append(textnorm.token_surfaces(lp.pair.s1))
                sentences.append(textnorm.token_surfaces(lp.pair.s2))
            tsm = embeddings.build_term_sentence_matrix(sentences)
            k = min(int(cfg.get("factor_k", 100)),
                    len(tsm.vocab), len(sentences))
            factor_model = embeddings.factorize(
                tsm, k=k,
                regularizer=float(cfg.get("factor_lambda", 20.0)),
                missing_weight=float(cfg.get("factor_missing_weight", 0.01)),
                ortho_weight=float(cfg.get("factor_ortho_weight", 0.0)),
                sweeps=int(cfg.get("factor_sweeps", 10)),
                seed=int(cfg.get("seed", 0)))
            if factors_path:
                embeddings.save_factor_model(factor_model, factors_path)
        else:
            raise click.UsageError("mode %s requires --factors" % mode.value)
    return identify.FeatureSpec(mode=mode, table=table,
                                factor_model=factor_model)


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--mode", required=True,
              type=click.Choice([m.value for m in identify.TRAINED_MODES]))
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True),
              default=None)
@click.option("--factors", "factors_path", type=click.Path(), default=None,
              help="Factor model file; trained and saved here if missing.")
@click.option("--l2", type=float, default=None)
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def train(ctx, corpus_path, mode, embeddings_path, factors_path, l2,
          output_path):
    """Train a paraphrase identification model."""
    if _skip_existing(ctx, output_path):
        return
    dataset, _ = corpus.import_labeled_tsv(corpus_path)
    if factors_path is None:
        factors_path = str(Path(output_path).with_suffix(".factors.npz"))
    spec = _build_spec(ctx, mode, embeddings_path, factors_path,
                       train_dataset=dataset)
    l2 = float(_cfg(ctx, "l2", l2, 1.0))
    pipeline = identify.train_pipeline(dataset, spec, l2=l2)
    identify.save_logistic(pipeline.logistic, spec.mode, output_path)
    _err("trained %s on %d pairs -> %s"
         % (mode, len(dataset.without_debatable().pairs), output_path))


def _load_scorer(ctx, model_path, mode, embeddings_path, factors_path):
    if model_path:
        logistic, mode_loaded = identify.load_logistic(model_path)
        if factors_path is None:
            guess = Path(model_path).with_suffix(".factors.npz")
            factors_path = str(guess) if guess.exists() else None
        spec = _build_spec(ctx, mode_loaded, embeddings_path, factors_path)
        return identify.make_scorer(spec, logistic), mode_loaded.value
    if not mode:
        raise click.UsageError("provide --model or --mode")
    spec = _build_spec(ctx, mode, embeddings_path, factors_path)
    seed = int(ctx.obj.get("config", {}).get("seed", 0))
    return identify.make_scorer(spec, seed=seed), mode


@cli.command("eval")
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--mode", type=click.Choice([m.value for m in identify.FeatureMode]),
              default=None, help="Raw scorer mode when no trained model.")
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True),
              default=None)
@click.option("--factors", "factors_path", type=click.Path(exists=True),
              default=None)
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--name", default=None, help="Row label in the report.")
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def eval_cmd(ctx, model_path, mode, embeddings_path, factors_path, corpus_path,
             name, output_path):
    """Evaluate a model on a labeled corpus; appends a benchmark row."""
    scorer, mode_name = _load_scorer(ctx, model_path, mode, embeddings_path,
                                     factors_path)
    dataset, _ = corpus.import_labeled_tsv(corpus_path)
    result = identify.evaluate(scorer, dataset)
    report.append_eval_row(output_path, name or mode_name, result)
    _err("%s: max-F1 %.3f (P %.3f, R %.3f) at-0.5 F1 %.3f on %d pairs"
         % (name or mode_name, result.max_f1.f1, result.max_f1.precision,
            result.max_f1.recall, result.at_half.f1, result.n_pairs))


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True),
              default=None)
@click.option("--factors", "factors_path", type=click.Path(exists=True),
              default=None)
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--threshold", type=float, default=0.5)
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def mine(ctx, model_path, embeddings_path, factors_path, pairs_path,
         threshold, output_path):
    """Mine silver-standard paraphrases above a probability threshold."""
    if _skip_existing(ctx, output_path):
        return
    scorer, _ = _load_scorer(ctx, model_path, None, embeddings_path,
                             factors_path)
    candidates = _read_pairs_tsv(pairs_path)
    mined = identify.mine_silver(scorer, candidates, threshold=threshold)
    with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
        for sp in mined:
            fh.write("%s\t%s\t%s\t%s\t%.6f\n"
                     % (sp.pair.pair_id, sp.pair.url or "", sp.pair.s1,
                        sp.pair.s2, sp.probability))
    _err("mined %d of %d pairs at threshold %.2f"
         % (len(mined), len(candidates), threshold))


# ---------------------------------------------------------------- phrasal

def _align_one(args):
    pair, table, stopwords = args
    src = textnorm.token_surfaces(pair.s1)
    tgt = textnorm.token_surfaces(pair.s2)
    alignment = phrasal.align(src, tgt, table=table, stopwords=stopwords)
    return pair.pair_id, sorted(alignment.links)


@cli.command()
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True),
              default=None)
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def align(ctx, pairs_path, embeddings_path, output_path):
    """Word-align sentence pairs; one line of i-j links per pair."""
    if _skip_existing(ctx, output_path):
        return
    table = (embeddings.load_embeddings(embeddings_path)
             if embeddings_path else None)
    sentence_pairs = _read_pairs_tsv(pairs_path)
    jobs = ctx.obj.get("jobs", 1)
    work = [(p, table, textnorm.STOPWORDS) for p in sentence_pairs]
    if jobs > 1 and len(work) > 64:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_align_one, work, chunksize=16))
    else:
        results = [_align_one(w) for w in work]
    with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
        for pair_id, links in results:
            fh.write("%s\t%s\n" % (pair_id,
                                   " ".join("%d-%d" % l for l in links)))
    _err("aligned %d pairs" % len(results))


@cli.command()
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--alignments", "alignments_path", required=True,
              type=click.Path(exists=True))
@click.option("--max-len", type=int, default=4)
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def extract(ctx, pairs_path, alignments_path, max_len, output_path):
    """Extract consistent phrase pairs and build the phrase table."""
    if _skip_existing(ctx, output_path):
        return
    sentence_pairs = {p.pair_id: p for p in _read_pairs_tsv(pairs_path)}
    all_pairs = []
    all_links = []
    with open(alignments_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            pair_id, _, links_str = line.partition("\t")
            pair = sentence_pairs.get(pair_id)
            if pair is None:
                continue
            links = frozenset(tuple(map(int, l.split("-")))
                              for l in links_str.split() if l)
            src = textnorm.token_surfaces(pair.s1)
            tgt = textnorm.token_surfaces(pair.s2)
            alignment = phrasal.Alignment(links=links)
            all_pairs.extend(phrasal.extract_phrases(src, tgt, alignment,
                                                     max_len=max_len))
            all_links.extend(phrasal.word_links(src, tgt, alignment))
    if not all_pairs:
        raise click.ClickException("no phrase pairs extracted")
    table = phrasal.build_phrase_table(all_pairs, links=all_links)
    phrasal.save_phrase_table(table, output_path)
    _err("extracted %d phrase pair tokens, %d table entries"
         % (len(all_pairs), len(table.entries)))


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True),
              help="Plain text, one sentence per line.")
@click.option("--order", type=int, default=3)
@click.option("--min-count", type=int, default=1)
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def lm(ctx, corpus_path, order, min_count, output_path):
    """Train a Kneser-Ney n-gram LM and save it in ARPA format."""
    if _skip_existing(ctx, output_path):
        return
    sentences = []
    with open(corpus_path, encoding="utf-8") as fh:
        for line in fh:
            toks = textnorm.token_surfaces(line.strip())
            if toks:
                sentences.append(toks)
    model = phrasal.NgramLM(order=order, min_count=min_count).fit(sentences)
    phrasal.save_arpa(model, output_path)
    _err("trained order-%d LM on %d sentences -> %s"
         % (order, len(sentences), output_path))


def _read_ratings(path):
    ratings = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            p, pp, score = line.split("\t")
            ratings[(tuple(p.split()), tuple(pp.split()))] = float(score)
    return ratings


@cli.command()
@click.option("--table", "table_path", required=True, type=click.Path(exists=True))
@click.option("--lm", "lm_path", type=click.Path(exists=True), default=None)
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True),
              default=None)
@click.option("--ratings", "ratings_path", required=True,
              type=click.Path(exists=True),
              help="TSV p, p', human score 1-5 for combiner training.")
@click.option("--ridge", type=float, default=1.0)
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def rank(ctx, table_path, lm_path, embeddings_path, ratings_path, ridge,
         output_path):
    """Rank phrase-table entries with the trained ridge combiner."""
    if _skip_existing(ctx, output_path):
        return
    table = phrasal.load_phrase_table(table_path)
    lm_model = phrasal.load_arpa(lm_path) if lm_path else None
    emb_table = (embeddings.load_embeddings(embeddings_path)
                 if embeddings_path else None)
    ratings = _read_ratings(ratings_path)
    feats = {}
    for (source, target), entry in table.entries.items():
        feats[(source, target)] = rank_mod.phrase_pair_features(
            source, target, entry, lm_model=lm_model, table=emb_table)
    rated_keys = [k for k in feats if k in ratings]
    if len(rated_keys) < 6:
        raise click.UsageError("need >= 6 rated pairs present in the table")
    model = phrasal.train_rank([feats[k] for k in rated_keys],
                               [ratings[k] for k in rated_keys], ridge=ridge)
    scored = sorted(((phrasal.rank_score(model, feats[k]), k) for k in feats),
                    key=lambda x: (-x[0], x[1]))
    with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
        for score, (source, target) in scored:
            fh.write("%s\t%s\t%.6f\n" % (" ".join(source), " ".join(target),
                                         score))
    _err("ranked %d entries using %d ratings" % (len(scored), len(rated_keys)))


@cli.command()
@click.option("--table-a", required=True, type=click.Path(exists=True))
@click.option("--table-b", required=True, type=click.Path(exists=True))
@click.option("--sample", type=int, default=420)
@click.option("--seed", type=int, default=0)
@click.pass_context
def overlap(ctx, table_a, table_b, sample, seed):
    """Coverage comparison of two phrase tables on a pooled sample."""
    a = phrasal.load_phrase_table(table_a)
    b = phrasal.load_phrase_table(table_b)
    result = phrasal.table_overlap(a, b, sample_size=sample, seed=seed)
    if result["capped"]:
        _err("warning: sample size capped at table size")
    click.echo("coverage_a\t%.1f%%" % (100 * result["coverage_a"]))
    click.echo("coverage_b\t%.1f%%" % (100 * result["coverage_b"]))


# --------------------------------------------------------------- annotation

@cli.command("annotate-serve")
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--tasks", "tasks_path", type=click.Path(exists=True), default=None)
@click.option("--workers", "workers_path", type=click.Path(exists=True),
              default=None, help="File with one worker id per line.")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.pass_context
def annotate_serve(ctx, data_dir, tasks_path, workers_path, host, port):
    """Run the annotation HTTP service."""
    import uvicorn

    store = annotate.AnnotationStore(data_dir)
    if tasks_path:
        known = set(store.tasks)
        new = [t for t in annotate.load_tasks_jsonl(tasks_path)
               if t.task_id not in known]
        store.add_tasks(new)
        _err("loaded %d new tasks (%d total)" % (len(new), len(store.tasks)))
    if workers_path:
        for line in open(workers_path, encoding="utf-8"):
            worker = line.strip()
            if worker:
                store.register_worker(worker)
    app = annotate.create_app(store)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@cli.command("reopen-tasks")
@click.option("--data-dir", required=True, type=click.Path(exists=True))
@click.option("--worker", required=True)
@click.pass_context
def reopen_tasks(ctx, data_dir, worker):
    """Void a low-quality worker's labels so their tasks re-enter the queue."""
    store = annotate.AnnotationStore(data_dir)
    store.reopen_worker(worker)
    _err("reopened tasks labeled by %s" % worker)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except (FileNotFoundError, IsADirectoryError, PermissionError,
            annotate.UnknownWorkerError, identify.ConfigurationError) as exc:
        _err("error: %s" % exc)
        sys.exit(1)
    except Exception as exc:  # data or numerical failure mid-run
        _err("runtime error: %s" % exc)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
