use std::fs;
use std::io::Cursor;

use robolex::grammar::{gen_synthetic, Grammar};
use robolex_cli::commands::{cmd_train, translate_line, LineResult};
use robolex_cli::corpus_io::{format_tsv, read_tuples};
use robolex_cli::teach::Teacher;
use robolex_cli::RunConfig;

fn setup(dir: &std::path::Path) -> RunConfig {
    let g = Grammar::navigation();
    let syn = gen_synthetic(&g, g.bank().unwrap(), 2, 11).unwrap();
    let corpus = dir.join("corpus.tsv");
    fs::write(&corpus, format_tsv(&syn.corpus)).unwrap();
    let cfg = RunConfig {
        corpus: Some(corpus),
        model_dir: dir.join("model"),
        session: dir.join("session.tsv"),
        test_fraction: 0.0,
        ..RunConfig::default()
    };
    cmd_train(&cfg, &mut Vec::new()).unwrap();
    cfg
}

fn session(teacher_input: &str, cfg: &RunConfig) -> (String, usize) {
    let mut t = Teacher::new(cfg).unwrap();
    let mut out = Vec::new();
    t.run(&mut Cursor::new(teacher_input.as_bytes().to_vec()), &mut out).unwrap();
    (String::from_utf8(out).unwrap(), t.appended())
}

#[test]
fn confident_translation_is_not_questioned() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path());
    let (out, n) = session("go to the house\n:quit\n", &cfg);
    assert_eq!(n, 0);
    assert!(out.contains("navigate to the building\t"));
    assert!(!out.contains("paraphrase>"));
    assert!(!cfg.session.exists());
}

#[test]
fn low_score_prompts_and_appends() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path());
    let script = "wobble to the car\n\
                  go to the car\n\
                  wobble to the moon\n\
                  navigate to the car\n\
                  :quit\n";
    let (out, n) = session(script, &cfg);
    assert_eq!(n, 1);
    assert!(out.contains("paraphrase> "));
    assert!(out.contains("not a valid robot command: wobble to the moon"));
    let text = fs::read_to_string(&cfg.session).unwrap();
    assert_eq!(
        text.lines().last().unwrap(),
        "session-0001\tnavigation\twobble to the car\tgo to the car\tnavigate to the car"
    );

    let (_, n) = session("wobble to the building\nmove to the building\nnavigate to the building\n", &cfg);
    assert_eq!(n, 1);
    let tuples = read_tuples(&cfg.session).unwrap();
    assert_eq!(tuples.len(), 2);
    assert_eq!(tuples[1].id, "session-0002");
}

#[test]
fn end_of_input_mid_prompt_keeps_earlier_tuples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path());
    let (_, n) = session("wobble to the car\ngo to the car\nnavigate to the car\nwobble again\n", &cfg);
    assert_eq!(n, 1);
    assert_eq!(read_tuples(&cfg.session).unwrap().len(), 1);
}

/// The base corpus never uses "scoot". After ten taught tuples and a retrain,
/// an untaught combination with it translates correctly.
#[test]
fn retrain_fills_a_phrase_gap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path());
    let grammars = [Grammar::navigation()];
    let probe = "scoot to the vehicle which is on the right side of the house";
    let expected = "navigate to the car that is on the right of the building";

    let teacher = Teacher::new(&cfg).unwrap();
    let before = translate_line(teacher.model(), &grammars, &cfg, probe);
    assert!(!teacher.confident(&before));
    assert!(!matches!(&before, LineResult::Translated { target, .. } if target == expected));

    let taught = [
        ("scoot to the car", "go to the car", "navigate to the car"),
        ("scoot to the house", "go to the house", "navigate to the building"),
        ("scoot to the orange barrel", "go to the orange barrel", "navigate to the traffic barrel"),
        ("scoot to the vehicle behind the house", "go to the vehicle behind the house", "navigate to the car that is behind the building"),
        ("scoot to the house which is at the left side of the car", "go to the house which is at the left side of the car", "navigate to the building that is on the left of the car"),
        ("scoot to the car in front of the traffic barrel", "go to the car in front of the traffic barrel", "navigate to the car that is in front of the traffic barrel"),
        ("scoot to a building which is on the right side of the vehicle", "go to a building which is on the right side of the vehicle", "navigate to the building that is on the right of the car"),
        ("scoot to the orange barrel located at the back of the car", "go to the orange barrel located at the back of the car", "navigate to the traffic barrel that is behind the car"),
        ("scoot to the vehicle to the left of the house", "go to the vehicle to the left of the house", "navigate to the car that is on the left of the building"),
        ("scoot to a traffic barrel which is in front of the building", "go to a traffic barrel which is in front of the building", "navigate to the traffic barrel that is in front of the building"),
    ];
    let mut script = String::new();
    for (s, t, r) in taught {
        script.push_str(&format!("{s}\n{t}\n{r}\n"));
    }
    script.push_str(":retrain\n");
    script.push_str(probe);
    script.push('\n');
    let (out, n) = session(&script, &cfg);
    assert_eq!(n, 10);
    assert!(out.contains("retrained on"));
    let last = out.lines().rev().find(|l| l.contains('\t')).unwrap().trim_start_matches("> ");
    assert!(last.starts_with(&format!("{expected}\t")), "{last}");
    assert!(last.ends_with("\tok"));

    let reloaded = Teacher::new(&cfg).unwrap();
    match translate_line(reloaded.model(), &grammars, &cfg, probe) {
        LineResult::Translated { target, .. } => assert_eq!(target, expected),
        other => panic!("{other:?}"),
    }
}
