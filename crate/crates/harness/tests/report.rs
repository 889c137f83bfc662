use dequant::Algorithm;
use dequant_harness::report::{read_json_report, rows_to_csv};
use dequant_harness::{emit_report, summarize, Report, ReportFormat, ResultRow};

fn row(alg: Algorithm, w: u32, delta: Option<f64>) -> ResultRow {
    ResultRow {
        input: "x".into(),
        w,
        algorithm: alg,
        iterations: 100,
        delta_sdr_db: delta,
        sdr_db: delta.map(|d| d + 10.0),
        consistent: delta.is_some(),
        wall_time_s: 0.5,
        params: "gamma=1".into(),
        error: delta.is_none().then(|| "boom".to_string()),
        odg: None,
    }
}

#[test]
fn summary_mean_of_two_rows() {
    let s = summarize(&[
        row(Algorithm::DrConsSyn, 4, Some(2.0)),
        row(Algorithm::DrConsSyn, 4, Some(5.0)),
    ]);
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].mean_delta_sdr_db, Some(3.5));
    assert_eq!((s[0].rows, s[0].failed), (2, 0));
}

#[test]
fn single_row_summary_equals_row() {
    let s = summarize(&[row(Algorithm::SSpadq, 6, Some(-1.25))]);
    assert_eq!(s[0].mean_delta_sdr_db, Some(-1.25));
    assert_eq!((s[0].algorithm, s[0].w, s[0].iterations), (Algorithm::SSpadq, 6, 100));
}

#[test]
fn failed_rows_are_counted_not_averaged() {
    let s = summarize(&[
        row(Algorithm::CpConsAna, 3, Some(4.0)),
        row(Algorithm::CpConsAna, 3, None),
        row(Algorithm::CpConsAna, 5, None),
    ]);
    assert_eq!(s[0].mean_delta_sdr_db, Some(4.0));
    assert_eq!((s[0].rows, s[0].failed), (2, 1));
    assert_eq!(s[1].mean_delta_sdr_db, None);
}

#[test]
fn json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let rows = vec![
        row(Algorithm::DrConsSyn, 4, Some(2.0)),
        row(Algorithm::ASpadq, 4, Some(0.1)),
        row(Algorithm::DrConsSyn, 4, None),
    ];
    emit_report(&rows, ReportFormat::Json, &path).unwrap();
    let back = read_json_report(&path).unwrap();
    assert_eq!(back, Report::new(rows).unwrap());
}

#[test]
fn csv_layout() {
    let csv = rows_to_csv(&[
        row(Algorithm::DrConsSyn, 4, Some(2.0)),
        row(Algorithm::CpConsAna, 2, None),
    ])
    .unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "input,w,algorithm,iterations,delta_sdr_db,sdr_db,consistent,wall_time_s,params"
    );
    assert_eq!(lines[1], "x,4,dr-cons-syn,100,2,12,true,0.5,gamma=1");
    assert_eq!(lines[2], "x,2,cp-cons-ana,100,,,false,0.5,error: boom");
}

#[test]
fn empty_reports_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(emit_report(&[], ReportFormat::Csv, dir.path().join("r.csv")).is_err());
    assert!(Report::new(vec![]).is_err());
}
