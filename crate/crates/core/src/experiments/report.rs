//! Turning cycle results into numbers and files: exact error percentages,
//! a machine-readable CSV format, and a human-readable table.

use super::{CycleReport, ErrorDenominator, MethodId, ModeId, ProtocolError};
use std::fmt::Write as _;

/// Error rate as a percentage.
///
/// The `AllTrials` denominator computes `mistakes * 100 / trials` with the
/// multiplication done in integers, so common cases are exact: 3 mistakes
/// in 10 trials is precisely `30.0`. `CorrectAnswers` divides by the number
/// of correct answers instead, which reads as "mistakes per hundred
/// correct" and can exceed 100.
pub fn error_percentage(
    mistakes: u32,
    trials: u32,
    denominator: ErrorDenominator,
) -> Result<f64, ProtocolError> {
    if trials == 0 {
        return Err(ProtocolError::NoTrials);
    }
    if mistakes > trials {
        return Err(ProtocolError::BadConfig(format!(
            "{mistakes} mistakes cannot come out of {trials} trials"
        )));
    }
    match denominator {
        ErrorDenominator::AllTrials => {
            Ok((u64::from(mistakes) * 100) as f64 / f64::from(trials))
        }
        ErrorDenominator::CorrectAnswers => {
            let correct = trials - mistakes;
            if correct == 0 {
                return Err(ProtocolError::NoCorrectAnswers);
            }
            Ok((u64::from(mistakes) * 100) as f64 / f64::from(correct))
        }
    }
}

/// Header line of the CSV report format.
pub const CSV_HEADER: &str = "dataset,cycle,method,mode,error_pct,mean_elapsed_ns,trials";

/// Renders reports as CSV. Floats print in shortest-round-trip form, so
/// identical runs produce byte-identical files.
pub fn emit_csv(reports: &[CycleReport]) -> String {
    let mut out = String::with_capacity(64 * (reports.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.dataset,
            r.cycle,
            r.method.name(),
            r.mode.name(),
            r.error_pct,
            r.mean_elapsed_ns,
            r.trials
        );
    }
    out
}

/// Parses the format produced by [`emit_csv`]. Round-trips losslessly
/// except for `mistakes`, which the CSV does not carry; it is reconstructed
/// from the error percentage assuming the all-trials denominator.
pub fn parse_csv(text: &str) -> Result<Vec<CycleReport>, ProtocolError> {
    let bad = |line: usize, reason: String| ProtocolError::MalformedReport { line, reason };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(bad(1, format!("unexpected header {header:?}")));
        }
        None => return Err(bad(1, "empty report".into())),
    }

    let mut reports = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(bad(n, format!("expected 7 fields, found {}", fields.len())));
        }
        let cycle: u32 = fields[1]
            .parse()
            .map_err(|_| bad(n, format!("bad cycle {:?}", fields[1])))?;
        let method = MethodId::parse(fields[2])
            .ok_or_else(|| bad(n, format!("unknown method {:?}", fields[2])))?;
        let mode = ModeId::parse(fields[3])
            .ok_or_else(|| bad(n, format!("unknown mode {:?}", fields[3])))?;
        let error_pct: f64 = fields[4]
            .parse()
            .map_err(|_| bad(n, format!("bad error percentage {:?}", fields[4])))?;
        if !error_pct.is_finite() || error_pct < 0.0 {
            return Err(bad(n, format!("error percentage {error_pct} out of range")));
        }
        let mean_elapsed_ns: u64 = fields[5]
            .parse()
            .map_err(|_| bad(n, format!("bad mean time {:?}", fields[5])))?;
        let trials: u32 = fields[6]
            .parse()
            .map_err(|_| bad(n, format!("bad trial count {:?}", fields[6])))?;
        let mistakes = (error_pct * f64::from(trials) / 100.0).round() as u32;
        reports.push(CycleReport {
            dataset: fields[0].to_string(),
            cycle,
            method,
            mode,
            trials,
            mistakes: mistakes.min(trials),
            error_pct,
            mean_elapsed_ns,
        });
    }
    Ok(reports)
}

/// Mean of the per-cycle mean prediction times, one entry per
/// (method, mode) pair present, in canonical order.
pub fn timing_summary(reports: &[CycleReport]) -> Vec<(MethodId, ModeId, u64)> {
    let mut out = Vec::new();
    for method in MethodId::ALL {
        for mode in ModeId::ALL {
            let cells: Vec<u64> = reports
                .iter()
                .filter(|r| r.method == method && r.mode == mode)
                .map(|r| r.mean_elapsed_ns)
                .collect();
            if !cells.is_empty() {
                let mean = cells.iter().sum::<u64>() / cells.len() as u64;
                out.push((method, mode, mean));
            }
        }
    }
    out
}

/// Renders a human-readable table per dataset: one error-percentage column
/// per (method, mode) pair, one row per cycle plus a mean row, followed by
/// a mean-prediction-time block.
pub fn emit_table(reports: &[CycleReport]) -> String {
    let mut datasets: Vec<&str> = Vec::new();
    for r in reports {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
    }

    let mut out = String::new();
    for dataset in datasets {
        let rows: Vec<&CycleReport> =
            reports.iter().filter(|r| r.dataset == dataset).collect();
        let mut columns: Vec<(MethodId, ModeId)> = Vec::new();
        for method in MethodId::ALL {
            for mode in ModeId::ALL {
                if rows.iter().any(|r| r.method == method && r.mode == mode) {
                    columns.push((method, mode));
                }
            }
        }
        let mut cycles: Vec<u32> = rows.iter().map(|r| r.cycle).collect();
        cycles.sort_unstable();
        cycles.dedup();

        let _ = writeln!(out, "== {dataset} ==");
        let _ = writeln!(out, "error (%)");
        let _ = write!(out, "{:>6}", "cycle");
        for (method, mode) in &columns {
            let _ = write!(out, "  {:>20}", format!("{}/{}", method.name(), mode.name()));
        }
        out.push('\n');
        let cell = |cycle: u32, method: MethodId, mode: ModeId| -> Option<&CycleReport> {
            rows.iter()
                .find(|r| r.cycle == cycle && r.method == method && r.mode == mode)
                .copied()
        };
        for &cycle in &cycles {
            let _ = write!(out, "{cycle:>6}");
            for &(method, mode) in &columns {
                match cell(cycle, method, mode) {
                    Some(r) => {
                        let _ = write!(out, "  {:>20.2}", r.error_pct);
                    }
                    None => {
                        let _ = write!(out, "  {:>20}", "-");
                    }
                }
            }
            out.push('\n');
        }
        let _ = write!(out, "{:>6}", "mean");
        for &(method, mode) in &columns {
            let cells: Vec<f64> = rows
                .iter()
                .filter(|r| r.method == method && r.mode == mode)
                .map(|r| r.error_pct)
                .collect();
            let mean = cells.iter().sum::<f64>() / cells.len() as f64;
            let _ = write!(out, "  {mean:>20.2}");
        }
        out.push('\n');

        let _ = writeln!(out, "mean prediction time (ns)");
        let _ = write!(out, "{:>6}", "");
        let timings = timing_summary(&rows.iter().map(|r| (*r).clone()).collect::<Vec<_>>());
        for &(method, mode) in &columns {
            let t = timings
                .iter()
                .find(|(m, o, _)| *m == method && *o == mode)
                .map(|(_, _, ns)| *ns)
                .unwrap_or(0);
            let _ = write!(out, "  {t:>20}");
        }
        out.push('\n');
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(
        dataset: &str,
        cycle: u32,
        method: MethodId,
        mode: ModeId,
        mistakes: u32,
        trials: u32,
        ns: u64,
    ) -> CycleReport {
        CycleReport {
            dataset: dataset.to_string(),
            cycle,
            method,
            mode,
            trials,
            mistakes,
            error_pct: error_percentage(mistakes, trials, ErrorDenominator::AllTrials).unwrap(),
            mean_elapsed_ns: ns,
        }
    }

    #[test]
    fn error_percentage_is_exact_for_decimal_cases() {
        let pct = error_percentage(3, 10, ErrorDenominator::AllTrials).unwrap();
        assert_eq!(pct, 30.0);
        assert_eq!(
            error_percentage(1, 4, ErrorDenominator::AllTrials).unwrap(),
            25.0
        );
        assert_eq!(
            error_percentage(0, 7, ErrorDenominator::AllTrials).unwrap(),
            0.0
        );
        assert_eq!(
            error_percentage(7, 7, ErrorDenominator::AllTrials).unwrap(),
            100.0
        );
    }

    #[test]
    fn error_percentage_per_correct_answer() {
        // 3 mistakes, 7 correct: 3/7 of a hundred.
        let pct = error_percentage(3, 10, ErrorDenominator::CorrectAnswers).unwrap();
        assert!((pct - 300.0 / 7.0).abs() < 1e-12);
        assert!(matches!(
            error_percentage(5, 5, ErrorDenominator::CorrectAnswers),
            Err(ProtocolError::NoCorrectAnswers)
        ));
    }

    #[test]
    fn error_percentage_rejects_degenerate_input() {
        assert!(matches!(
            error_percentage(0, 0, ErrorDenominator::AllTrials),
            Err(ProtocolError::NoTrials)
        ));
        assert!(error_percentage(11, 10, ErrorDenominator::AllTrials).is_err());
    }

    #[test]
    fn csv_round_trips() {
        let reports = vec![
            report("car", 1, MethodId::Nn, ModeId::Untrained, 2481, 3000, 1840),
            report("car", 1, MethodId::Intuition, ModeId::Trained, 907, 3000, 312),
            report("poker", 2, MethodId::Hmm, ModeId::Trained, 4321, 10000, 955),
        ];
        let csv = emit_csv(&reports);
        assert!(csv.starts_with(CSV_HEADER));
        let parsed = parse_csv(&csv).unwrap();
        assert_eq!(parsed, reports);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("wrong,header\n").is_err());
        let missing_field = format!("{CSV_HEADER}\ncar,1,nn,untrained,50,100\n");
        assert!(matches!(
            parse_csv(&missing_field),
            Err(ProtocolError::MalformedReport { line: 2, .. })
        ));
        let bad_method = format!("{CSV_HEADER}\ncar,1,svm,untrained,50,100,10\n");
        assert!(parse_csv(&bad_method).is_err());
        let negative = format!("{CSV_HEADER}\ncar,1,nn,untrained,-3,100,10\n");
        assert!(parse_csv(&negative).is_err());
    }

    #[test]
    fn identical_reports_emit_identical_csv() {
        let a = vec![report("car", 1, MethodId::Nn, ModeId::Trained, 333, 999, 0)];
        let b = vec![report("car", 1, MethodId::Nn, ModeId::Trained, 333, 999, 0)];
        assert_eq!(emit_csv(&a), emit_csv(&b));
        // A third of trials missed: non-terminating decimal, still stable.
        assert!(emit_csv(&a).contains("33.333333333333336"));
    }

    #[test]
    fn timing_summary_averages_cycles() {
        let reports = vec![
            report("car", 1, MethodId::Nn, ModeId::Untrained, 1, 10, 100),
            report("car", 2, MethodId::Nn, ModeId::Untrained, 1, 10, 300),
            report("car", 1, MethodId::Intuition, ModeId::Untrained, 1, 10, 50),
        ];
        let summary = timing_summary(&reports);
        assert_eq!(
            summary,
            vec![
                (MethodId::Nn, ModeId::Untrained, 200),
                (MethodId::Intuition, ModeId::Untrained, 50),
            ]
        );
    }

    #[test]
    fn table_lists_every_column_and_cycle() {
        let reports = vec![
            report("car", 1, MethodId::Nn, ModeId::Untrained, 5, 10, 100),
            report("car", 2, MethodId::Nn, ModeId::Untrained, 6, 10, 100),
            report("car", 1, MethodId::Intuition, ModeId::Trained, 2, 10, 40),
            report("car", 2, MethodId::Intuition, ModeId::Trained, 3, 10, 40),
        ];
        let table = emit_table(&reports);
        assert!(table.contains("== car =="));
        assert!(table.contains("nn/untrained"));
        assert!(table.contains("intuition/trained"));
        assert!(table.contains("50.00"));
        assert!(table.contains("60.00"));
        // Mean row: (50 + 60) / 2 and (20 + 30) / 2.
        assert!(table.contains("55.00"));
        assert!(table.contains("25.00"));
        assert!(table.contains("mean prediction time (ns)"));
    }
}
