use ddrank_cli::render::{
    parse_leaderboard_csv, render_grid, render_leaderboard, sweep_grid, BoardRow, Format, SweepRow,
};
use ddrank_core::metrics::{sweep_weights, MetricResult};
use ddrank_core::{AccuracyRecord, MetricWeights};

fn words(line: &str) -> String {
    line.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn row(method: &str, rank: usize, acc: (f64, f64, f64, f64), ars: Option<f64>) -> BoardRow {
    let r = AccuracyRecord::new(acc.0, acc.1, acc.2, acc.3).unwrap();
    let m = MetricResult::compute(&r, None, MetricWeights::default()).unwrap();
    BoardRow {
        rank,
        dataset: "cifar10".into(),
        model: "convnet".into(),
        ipc: 1,
        lambda: 0.5,
        gamma: 0.5,
        method: method.into(),
        hlr: Some(m.hlr),
        ior: Some(m.ior),
        lrs: Some(m.lrs),
        ars,
    }
}

#[test]
fn injected_accuracies_render_the_expected_row() {
    // real 84.7, syn hard 32.0, syn 62.4, random 50.0
    let dc = row("DC", 1, (0.847, 0.320, 0.624, 0.500), None);
    let text = render_leaderboard(&[dc], Format::Table).unwrap();
    let line = text.lines().find(|l| l.contains("DC")).unwrap();
    assert!(words(line).ends_with("DC 52.7 12.4 19.1"), "{line}");
    assert!(text.lines().next().unwrap().contains("HLR↓  IOR↑  LRS↑"));
}

#[test]
fn empty_leaderboard_is_header_only() {
    let t = render_leaderboard(&[], Format::Table).unwrap();
    assert_eq!(t.lines().count(), 2);
    assert!(t.lines().nth(1).unwrap().chars().all(|c| c == '-'));
    let c = render_leaderboard(&[], Format::Csv).unwrap();
    assert_eq!(
        c,
        "rank,dataset,model,ipc,lambda,gamma,method,HLR↓,IOR↑,LRS↑,ARS↑\n"
    );
    assert_eq!(
        render_leaderboard(&[], Format::Markdown)
            .unwrap()
            .lines()
            .count(),
        2
    );
    assert!(parse_leaderboard_csv(&c).unwrap().is_empty());
}

#[test]
fn csv_round_trip_is_idempotent() {
    let rows = vec![
        row("DATM", 1, (0.847, 0.428, 0.718, 0.410), Some(30.05)),
        row("DC", 2, (0.847, 0.320, 0.624, 0.500), Some(24.96)),
        row("odd,name", 3, (0.5, 0.5, 0.45, 0.5), Some(0.0)),
    ];
    let first = render_leaderboard(&rows, Format::Csv).unwrap();
    let back = parse_leaderboard_csv(&first).unwrap();
    let second = render_leaderboard(&back, Format::Csv).unwrap();
    assert_eq!(first, second);
    for f in [Format::Table, Format::Markdown] {
        assert_eq!(
            render_leaderboard(&rows, f).unwrap(),
            render_leaderboard(&back, f).unwrap()
        );
    }
    assert!(first.contains("\"odd,name\""));
    assert!(!first.contains("30.05"));
}

#[test]
fn incomplete_reports_are_refused() {
    let mut a = row("A", 1, (0.8, 0.3, 0.6, 0.5), Some(20.0));
    let mut b = row("B", 2, (0.8, 0.3, 0.6, 0.5), None);
    assert!(render_leaderboard(&[a.clone(), b.clone()], Format::Table).is_err());
    b.ars = Some(10.0);
    a.hlr = None;
    assert!(render_leaderboard(&[a, b], Format::Csv).is_err());
    let bare = BoardRow {
        lrs: None,
        hlr: None,
        ior: None,
        ..row("C", 1, (0.8, 0.3, 0.6, 0.5), None)
    };
    assert!(render_leaderboard(&[bare], Format::Table).is_err());
}

#[test]
fn sweep_layout_is_method_by_lambda() {
    let lambdas = [0.1, 0.3, 0.5, 0.7, 0.9];
    let values: Vec<f64> = sweep_weights(0.527, 0.124, &lambdas)
        .unwrap()
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    let g = sweep_grid(
        &lambdas,
        &[SweepRow {
            method: "DC".into(),
            lrs: values,
        }],
    )
    .unwrap();
    let t = render_grid(&g, Format::Table);
    let lines: Vec<&str> = t.lines().collect();
    assert_eq!(words(lines[0]), "method λ=0.1 λ=0.3 λ=0.5 λ=0.7 λ=0.9");
    assert_eq!(words(lines[2]), "DC 11.2 14.9 19.1 24.0 29.5");
    assert!(sweep_grid(
        &lambdas,
        &[SweepRow {
            method: "X".into(),
            lrs: vec![1.0]
        }]
    )
    .is_err());
}
