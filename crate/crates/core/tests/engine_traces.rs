mod common;

use common::{rebuild_buffer, summary, Driver, DEAD_ZONE};
use slicetype::engine::DwellState;
use slicetype::merge::plan_merge;
use slicetype::trace::{read_trace, replay, write_trace, Sample};
use slicetype::{CornerKind, Keyboard, Mode, NgramModel, Session, SessionConfig, SessionEvent, Target};

fn session() -> Session {
    Session::new(NgramModel::bundled(), Keyboard::default(), SessionConfig::default()).unwrap()
}

fn tokens(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

#[test]
fn single_dwell_commits_at_exactly_the_period() {
    let mut s = session();
    let i = s.layout().key('i').unwrap().center;
    let mut log = Vec::new();
    for k in 0..=9 {
        log.extend(s.feed_sample(k as f64 * 100.0, i).unwrap());
    }
    assert!(!log.iter().any(|e| matches!(e, SessionEvent::CharCommitted { .. })));
    let at_1000 = s.feed_sample(1000.0, i).unwrap();
    assert_eq!(summary(&at_1000), tokens(&["char:i", "buffer:i", "layout"]));
    log.extend(at_1000);
    assert_eq!(summary(&log), tokens(&["enter:i", "char:i", "buffer:i", "layout"]));
}

#[test]
fn leaving_resets_the_timer() {
    let mut s = session();
    let i = s.layout().key('i').unwrap().center;
    let mut log = Vec::new();
    let mut commit_t = None;
    for k in 0..=17 {
        let t = k as f64 * 100.0;
        let p = if k == 6 { DEAD_ZONE } else { i };
        let ev = s.feed_sample(t, p).unwrap();
        if ev.iter().any(|e| matches!(e, SessionEvent::CharCommitted { .. })) {
            commit_t.get_or_insert(t);
        }
        log.extend(ev);
    }
    assert_eq!(commit_t, Some(1700.0));
    assert_eq!(
        summary(&log),
        tokens(&["enter:i", "exit:i", "enter:i", "char:i", "buffer:i", "layout"])
    );
}

#[test]
fn double_dwell_completes_input() {
    let mut d = Driver::new(session());
    d.letter('i');
    d.letter('n');
    d.word_via('p');
    assert_eq!(
        summary(&d.log),
        tokens(&[
            "enter:i", "char:i", "buffer:i", "layout",
            "exit:i", "enter:n", "char:n", "buffer:in", "layout",
            "exit:n", "enter:p", "char:p", "buffer:inp", "layout",
            "word:input", "buffer:input ", "layout",
        ])
    );
    assert_eq!(d.session.transcribe(), "input ");
    assert_eq!(d.session.prev_word(), Some("input"));
    assert_eq!(d.session.prefix(), "");
    assert!(matches!(d.state(), DwellState::MustExit { .. }));
    // The proposal was on display while dwelling on p.
    let shown = d.log.iter().find_map(|e| match e {
        SessionEvent::KeyEnter { target: Target::Key('p'), prediction } => prediction.clone(),
        _ => None,
    });
    assert_eq!(shown.unwrap().word, "input");
}

#[test]
fn repeated_letter_needs_an_exit() {
    let mut d = Driver::new(session());
    for c in ['w', 'i', 'n'] {
        d.letter(c);
    }
    // Staying on n would accept "win"; leave instead and come back.
    d.word_via('n');
    assert_eq!(
        summary(&d.log),
        tokens(&[
            "enter:w", "char:w", "buffer:w", "layout",
            "exit:w", "enter:i", "char:i", "buffer:wi", "layout",
            "exit:i", "enter:n", "char:n", "buffer:win", "layout",
            "exit:n", "enter:n", "char:n", "buffer:winn", "layout",
            "word:winning", "buffer:winning ", "layout",
        ])
    );
    let proposals: Vec<String> = d
        .log
        .iter()
        .filter_map(|e| match e {
            SessionEvent::KeyEnter { target: Target::Key('n'), prediction } => {
                prediction.as_ref().map(|p| p.word.clone())
            }
            _ => None,
        })
        .collect();
    assert_eq!(proposals, ["win", "winning"]);
}

#[test]
fn staying_put_never_commits_twice() {
    let mut d = Driver::new(session());
    let q = d.center(Target::Key('q'));
    d.hold(q, 10_000.0);
    // q, then the second dwell accepts the proposal; nothing after that.
    let commits: Vec<_> = summary(&d.log)
        .into_iter()
        .filter(|t| t.starts_with("char") || t.starts_with("word"))
        .collect();
    assert_eq!(commits.len(), 2, "{commits:?}");
    assert!(matches!(d.state(), DwellState::MustExit { .. }));
}

#[test]
fn non_merging_mode_learns_new_words() {
    let kb = Keyboard::default();
    let model = NgramModel::bundled();
    // After "in" the x key is gone and its area belongs to v.
    let plan = plan_merge(&model, &kb, None, "in");
    assert_eq!(plan.absorptions[&'x'], Some('v'));
    assert!(model.predict(None, "inx").is_none());

    let mut d = Driver::new(session());
    d.letter('i');
    d.letter('n');
    // Aiming where x used to be selects its absorber.
    d.sample(DEAD_ZONE);
    let x_spot = kb.sector('x').target_center();
    assert_eq!(d.session.layout().hit_test(x_spot), Some(Target::Key('v')));
    while d.session.transcribe() == "in" {
        d.sample(x_spot);
    }
    for _ in 0..3 {
        d.corner(CornerKind::Delete);
    }
    d.corner(CornerKind::Mode);
    assert_eq!(d.session.mode(), Mode::NonMerging);
    for c in ['i', 'n', 'x'] {
        d.letter(c);
    }
    d.corner(CornerKind::Space);
    assert_eq!(
        summary(&d.log),
        tokens(&[
            "enter:i", "char:i", "buffer:i", "layout",
            "exit:i", "enter:n", "char:n", "buffer:in", "layout",
            "exit:n", "enter:v", "char:v", "buffer:inv", "layout",
            "exit:v", "enter:delete", "delete:v", "buffer:in", "layout",
            "exit:delete", "enter:delete", "delete:n", "buffer:i", "layout",
            "exit:delete", "enter:delete", "delete:i", "buffer:", "layout",
            "exit:delete", "enter:mode", "mode:NonMerging", "layout",
            "exit:mode", "enter:i", "char:i", "buffer:i", "layout",
            "exit:i", "enter:n", "char:n", "buffer:in", "layout",
            "exit:n", "enter:x", "char:x", "buffer:inx", "layout",
            "exit:x", "enter:space", "space", "buffer:inx ", "layout",
        ])
    );
    assert_eq!(d.session.model().unigrams().count("inx"), 1);
    assert_eq!(d.session.model().predict(None, "inx").unwrap().word, "inx");
    // The shared bundled model is untouched.
    assert!(NgramModel::bundled().predict(None, "inx").is_none());

    // Back in merging mode, x now survives after "in".
    d.corner(CornerKind::Mode);
    d.letter('i');
    d.letter('n');
    assert!(d.session.layout().key('x').is_some());
}

#[test]
fn delete_on_empty_buffer_is_a_no_op() {
    let mut d = Driver::new(session());
    d.corner(CornerKind::Delete);
    assert_eq!(summary(&d.log), tokens(&["enter:delete", "buffer:"]));
}

#[test]
fn space_closes_the_word() {
    let mut d = Driver::new(session());
    d.letter('i');
    d.letter('n');
    d.corner(CornerKind::Space);
    assert_eq!(d.session.transcribe(), "in ");
    assert_eq!(d.session.prev_word(), Some("in"));
    assert_eq!(d.session.prefix(), "");
}

#[test]
fn mode_toggle_is_an_involution() {
    let mut d = Driver::new(session());
    d.letter('i');
    d.letter('n');
    let before = d.session.layout().clone();
    d.corner(CornerKind::Mode);
    assert_eq!(d.session.layout().keys.len(), 26);
    d.corner(CornerKind::Mode);
    assert_eq!(d.session.mode(), Mode::Merging);
    assert_eq!(d.session.layout(), &before);
    assert_eq!(d.session.transcribe(), "in");
}

#[test]
fn delete_at_word_start_reopens_previous_word() {
    let mut d = Driver::new(session());
    d.letter('i');
    d.word_via('n');
    assert_eq!(d.session.transcribe(), "in ");
    d.corner(CornerKind::Delete);
    assert_eq!(d.session.transcribe(), "in");
    assert_eq!(d.session.prefix(), "in");
    assert_eq!(d.session.prev_word(), None);
}

#[test]
fn buffer_equals_event_reconstruction() {
    let scripts: [&dyn Fn(&mut Driver); 3] = [
        &|d| {
            d.letter('i');
            d.letter('n');
            d.word_via('p');
        },
        &|d| {
            for c in ['w', 'i', 'n'] {
                d.letter(c);
            }
            d.word_via('n');
            d.corner(CornerKind::Delete);
            d.corner(CornerKind::Space);
        },
        &|d| {
            d.letter('t');
            d.letter('h');
            d.corner(CornerKind::Space);
            d.letter('a');
            d.corner(CornerKind::Delete);
        },
    ];
    for script in scripts {
        let mut d = Driver::new(session());
        script(&mut d);
        assert_eq!(rebuild_buffer(&d.log), d.session.transcribe());
    }
    assert_eq!(session().transcribe(), "");
}

#[test]
fn replay_is_byte_for_byte_deterministic() {
    let layout = Keyboard::default().default_layout();
    let i = layout.key('i').unwrap().center;
    let n = layout.key('n').unwrap().center;
    let samples: Vec<Sample> = (0..200)
        .map(|k| {
            let p = if k < 70 { i } else if k < 72 { DEAD_ZONE } else { n };
            Sample::new(k as f64 * common::STEP_MS, p)
        })
        .collect();
    let mut csv = Vec::new();
    write_trace(&mut csv, &samples).unwrap();
    let samples = read_trace(csv.as_slice()).unwrap();
    let run = || {
        let mut s = session();
        serde_json::to_vec(&replay(&mut s, &samples).unwrap()).unwrap()
    };
    let (a, b) = (run(), run());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn held_region_is_fixed_at_entry() {
    let kb = Keyboard::default();
    let plan = plan_merge(&NgramModel::bundled(), &kb, None, "h");
    assert_eq!(plan.absorptions[&'l'], Some('e'));

    let mut d = Driver::new(session());
    d.letter('h');
    d.sample(DEAD_ZONE);
    let e = d.center(Target::Key('e'));
    d.sample(e);
    let before = d.log.len();
    // Where l used to be is part of e while e is held.
    d.sample(kb.sector('l').target_center());
    assert!(!d.log[before..].iter().any(|ev| matches!(ev, SessionEvent::KeyExit { .. })));
    assert!(matches!(d.state(), DwellState::FirstDwell { key: Target::Key('e'), .. }));
}
