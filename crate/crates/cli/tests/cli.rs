use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const REFERENCE_TREE: &str = "(S (NP (PRP She)) (VP (VBD enjoyed) (NP (DT the) (CD three) (ADJP (RB fantastically) \
                          (JJ interesting)) (NNS books)) (NP-ADV (DT a) (NN lot))) (. .))";

fn run(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_impl"))
        .current_dir(cwd)
        .args(args)
        .output()
        .expect("spawn impl")
}

fn ok(cwd: &Path, args: &[&str]) -> String {
    let out = run(cwd, args);
    assert!(
        out.status.success(),
        "impl {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_sources(root: &Path, en: &[String], de: &[String]) {
    fs::create_dir_all(root.join("src")).unwrap();
    fs::write(root.join("src/en.txt"), en.join("\n") + "\n").unwrap();
    fs::write(root.join("src/de.txt"), de.join("\n") + "\n").unwrap();
}

fn small_corpus(root: &Path, n: usize) {
    let en: Vec<String> = (0..n)
        .map(|i| format!("the w{} saw a w{} near w{}", i % 13, i % 7, i % 5))
        .collect();
    let de: Vec<String> = (0..n).map(|i| format!("der satz {i}")).collect();
    write_sources(root, &en, &de);
    ok(root, &["build-corpus", "--sources", "a=src", "--test-size", &(n / 5).to_string(), "--seed", "1", "--out-dir", "c"]);
}

#[test]
fn build_corpus_counts_survivors_of_dedup() {
    let dir = tempfile::tempdir().unwrap();
    let mut en: Vec<String> = (0..40).map(|i| format!("sentence {i} has five words")).collect();
    en.extend((0..10).map(|i| format!("sentence  {i}  has five words ")));
    let de: Vec<String> = (0..50).map(|i| format!("satz {i}")).collect();
    write_sources(dir.path(), &en, &de);
    ok(dir.path(), &["build-corpus", "--sources", "a=src", "--test-size", "5", "--dedup-lang", "en", "--seed", "2", "--out-dir", "c"]);
    let stats = fs::read_to_string(dir.path().join("c/corpus.stats.tsv")).unwrap();
    // 40 unique sentences of 5 words, counted on the first language (de)
    assert!(stats.contains("overall\t40\t80"), "{stats}");
    let en_file = fs::read_to_string(dir.path().join("c/en.attested.corpus.tsv")).unwrap();
    assert_eq!(en_file.lines().count(), 40);
    assert_eq!(en_file.lines().filter(|l| l.split('\t').nth(3) == Some("test")).count(), 5);

    let first = fs::read(dir.path().join("c/en.attested.corpus.tsv")).unwrap();
    ok(dir.path(), &["build-corpus", "--sources", "a=src", "--test-size", "5", "--dedup-lang", "en", "--seed", "2", "--out-dir", "d"]);
    assert_eq!(first, fs::read(dir.path().join("d/en.attested.corpus.tsv")).unwrap());
}

#[test]
fn randomized_commands_need_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    write_sources(dir.path(), &["a b".into()], &["c d".into()]);
    let out = run(dir.path(), &["build-corpus", "--sources", "a=src", "--test-size", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn identity_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    small_corpus(dir.path(), 50);
    ok(dir.path(), &["perturb", "--corpus", "c/en.attested.corpus.tsv", "--spec", "identity", "--out-dir", "p"]);
    assert_eq!(
        fs::read(dir.path().join("c/en.attested.corpus.tsv")).unwrap(),
        fs::read(dir.path().join("p/en.identity.corpus.tsv")).unwrap()
    );
}

#[test]
fn unknown_spec_is_a_usage_error_listing_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["perturb", "--corpus", "x.tsv", "--spec", "shuffle_sideways"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for kind in ["reverse_full", "shuffle_local", "shuffle_deterministic", "np:<pattern>"] {
        assert!(err.contains(kind), "{err}");
    }
}

#[test]
fn verify_recovery_on_ten_thousand_records() {
    let dir = tempfile::tempdir().unwrap();
    let en: Vec<String> = (0..10_000)
        .map(|i| (0..1 + i % 23).map(|j| format!("w{}", (i * 31 + j * 7) % 97)).collect::<Vec<_>>().join(" "))
        .collect();
    let de: Vec<String> = (0..10_000).map(|i| format!("z{i}")).collect();
    write_sources(dir.path(), &en, &de);
    ok(dir.path(), &["build-corpus", "--sources", "a=src", "--test-size", "1000", "--seed", "0", "--out-dir", "c"]);
    let out = ok(
        dir.path(),
        &["perturb", "--corpus", "c/en.attested.corpus.tsv", "--spec", "shuffle_deterministic:s=84", "--tokenizer", "whitespace", "--verify-recovery", "--out-dir", "p"],
    );
    assert!(out.contains("recovery verified for 10000 records"), "{out}");

    let out = run(
        dir.path(),
        &["perturb", "--corpus", "c/en.attested.corpus.tsv", "--spec", "shuffle_nondeterministic:s=1", "--tokenizer", "whitespace", "--verify-recovery", "--out-dir", "q"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn np_perturbation_reproduces_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let en = vec!["She enjoyed the three fantastically interesting books a lot .".to_string()];
    write_sources(root, &en, &["Sie".to_string()]);
    fs::write(root.join("trees.txt"), format!("{REFERENCE_TREE}\n")).unwrap();
    ok(root, &["build-corpus", "--sources", "a=src", "--test-size", "1", "--seed", "0", "--out-dir", "c"]);
    ok(root, &["perturb", "--corpus", "c/en.attested.corpus.tsv", "--spec", "np:dnNa", "--trees", "trees.txt", "--preset", "english", "--out-dir", "p"]);
    let text = fs::read_to_string(root.join("p/en.np+dnNa.corpus.tsv")).unwrap();
    assert_eq!(
        text.trim_end().split('\t').last().unwrap(),
        "She enjoyed the three books fantastically interesting a lot ."
    );
    let pairs = fs::read_to_string(root.join("p/en.np+dnNa.pairs.tsv")).unwrap();
    assert_eq!(pairs.lines().count(), 1);

    let out = run(root, &["perturb", "--corpus", "c/en.attested.corpus.tsv", "--spec", "np:random", "--trees", "trees.txt", "--preset", "english"]);
    assert_eq!(out.status.code(), Some(1), "np:random without a seed");
}

#[test]
fn perplexity_report_carries_vocab_size() {
    let dir = tempfile::tempdir().unwrap();
    small_corpus(dir.path(), 100);
    ok(dir.path(), &["train-lm", "--corpus", "c/en.attested.corpus.tsv", "--order", "1", "--smoothing", "addk:1e12", "--unk-threshold", "1", "--out-dir", "m"]);
    let out = ok(dir.path(), &["eval-ppl", "--model", "m/en.attested.model.txt", "--corpus", "c/en.attested.corpus.tsv", "--out-dir", "e"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split('\t').collect();
    let ppl: f64 = row[3].parse().unwrap();
    let v: f64 = row[5].parse().unwrap();
    // the(1) saw a near w0..w12 plus <unk> and </s>
    assert_eq!(v, 19.0);
    assert!((ppl - v).abs() / v < 1e-6, "{ppl} vs {v}");
    let scores = fs::read_to_string(dir.path().join("e/en.attested-model.scores.tsv")).unwrap();
    assert_eq!(scores.lines().count(), 1 + 20);
}

#[test]
fn genscore_of_an_always_attested_scorer_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let mut pairs = String::new();
    let mut att = String::from("#sentence_id\tvariant\ttotal_logprob_nat\tunit_count\tcheckpoint\tseed\n");
    for id in 0..12 {
        pairs.push_str(&format!("{id}\tthe {id} books\tbooks {id} the\n"));
        att.push_str(&format!("{id}\tattested\t-10\t4\tfinal\t0\n{id}\tnp:Nnda\t-12\t4\tfinal\t0\n"));
    }
    fs::write(root.join("pairs.tsv"), pairs).unwrap();
    fs::write(root.join("att.tsv"), &att).unwrap();
    fs::write(root.join("unatt.tsv"), &att).unwrap();
    let out = ok(
        root,
        &["genscore", "--pairs", "pairs.tsv", "--att-scores", "att.tsv", "--unatt-scores", "unatt.tsv", "--unatt-variant", "np:Nnda", "--out-dir", "g"],
    );
    assert!(out.contains("delta\t1\n"), "{out}");
    assert!(out.contains("n\t12\n"), "{out}");

    let out = run(
        root,
        &["genscore", "--pairs", "pairs.tsv", "--att-scores", "att.tsv", "--unatt-scores", "unatt.tsv", "--unatt-variant", "np:dnaN"],
    );
    assert_eq!(out.status.code(), Some(1), "zero overlap must fail");
}

#[test]
fn separability_on_the_bundled_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/separable_trajectories.tsv");
    let f = fixture.to_str().unwrap();
    let out = ok(dir.path(), &["separability", "--trajectories", f, "--seed", "0", "--out-dir", "s"]);
    assert!(out.contains("mean\t1\n"), "{out}");
    let preds = fs::read_to_string(dir.path().join("s/separability.predictions.tsv")).unwrap();
    assert_eq!(preds.lines().count(), 61);
    assert_eq!(run(dir.path(), &["separability", "--trajectories", f]).status.code(), Some(1));

    ok(dir.path(), &["report", "--trajectories", f, "--langs", "l00,l01", "--out-dir", "r"]);
    let svg = fs::read_to_string(dir.path().join("r/l00.trajectories.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("shuffle_control"));
    assert!(!dir.path().join("r/l02.trajectories.svg").exists());

    let out = ok(dir.path(), &["stats", "welch", "--trajectories", f, "--baseline", "shuffle_control", "--out-dir", "w"]);
    // 30 languages x 1 variant x 12 checkpoints
    assert_eq!(out.lines().count(), 1 + 360);
}

#[test]
fn stats_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["stats", "mann-whitney", "--a", "1,2", "--b", "3,4"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(&row[..4], ["0", "0", "4", "3"]);
    assert!((row[4].parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let out = ok(dir.path(), &["stats", "spearman", "--x", "1,2,3,4", "--y", "-1,0,5,9"]);
    assert!(out.lines().nth(1).unwrap().starts_with("1\t4\t0\t"), "{out}");
    let out = ok(dir.path(), &["stats", "welch", "--a", "1,2,3", "--b", "2,1,3", "--comparisons", "3"]);
    assert_eq!(out.lines().nth(1).unwrap(), "0\t4\t1\t1");
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn tokenizer_commands() {
    let dir = tempfile::tempdir().unwrap();
    small_corpus(dir.path(), 60);
    ok(dir.path(), &["tokenize", "train", "--corpus", "c/en.attested.corpus.tsv", "--vocab-size", "60", "--out-dir", "t"]);
    let out = ok(
        dir.path(),
        &["tokenize", "tcw", "--corpus", "c/en.attested.corpus.tsv", "--tokenizer", "whitespace", "t/en.bpe.tokenizer.txt", "character", "--out-dir", "m"],
    );
    let tcw: Vec<f64> = out.lines().skip(1).map(|l| l.split('\t').nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(tcw[0], 1.0);
    assert!(tcw[2] >= tcw[1] && tcw[1] >= tcw[0], "{tcw:?}");
    ok(dir.path(), &["tokenize", "encode", "--corpus", "c/en.attested.corpus.tsv", "--tokenizer", "t/en.bpe.tokenizer.txt", "--out-dir", "e"]);
    assert_eq!(fs::read_to_string(dir.path().join("e/en.encoded.tsv")).unwrap().lines().count(), 60);
}
