//! Text formats shared by the library and CLI: sequence CSV, statistics
//! CSV, histogram CSV with JSON sidecar, and Q-function grid dumps.
//!
//! All numeric output is written with 17 significant digits so every f64
//! survives a write/read round trip bit-for-bit and downstream diffs are
//! byte-exact. Writers return `String`s (LF line endings); parsers take
//! `&str` and report 1-based line numbers.

use crate::experiment::EventHistogram;
use crate::homsim::{PhotonStatistics, SphereGrid};
use crate::{Complex64, Error, Result};

pub const SEQUENCE_HEADER: &str = "index,re,im";
pub const TRANSFORM_HEADER: &str = "k,re,im,abs2";
pub const STATISTICS_HEADER: &str = "k,probability,error";
pub const HISTOGRAM_HEADER: &str = "n1,n2,n3,n4,count";
pub const QFUNCTION_HEADER: &str = "theta,phi,q";

/// Full round-trip decimal formatting: 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn clip(text: &str) -> &str {
    match text.char_indices().nth(32) {
        Some((cut, _)) => &text[..cut],
        None => text,
    }
}

fn parse_field<T: std::str::FromStr>(line: usize, what: &str, text: &str) -> Result<T> {
    text.parse::<T>()
        .map_err(|_| Error::parse(line, format!("bad {what} value {:?}", clip(text))))
}

fn parse_finite(line: usize, what: &str, text: &str) -> Result<f64> {
    let v: f64 = parse_field(line, what, text)?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("{what} must be finite, got {:?}", clip(text))));
    }
    Ok(v)
}

/// Split a CSV record into exactly `n` comma-separated fields.
fn fields<'a, const N: usize>(line: usize, text: &'a str) -> Result<[&'a str; N]> {
    let mut out = [""; N];
    let mut parts = text.split(',');
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = parts.next().ok_or_else(|| {
            Error::parse(line, format!("expected {N} fields, got {i}"))
        })?;
    }
    if parts.next().is_some() {
        return Err(Error::parse(line, format!("expected {N} fields, got more")));
    }
    Ok(out)
}

/// Lines of `text` with their 1-based numbers, trailing `\r` stripped.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(i, l)| (i + 1, l))
}

fn check_header(got: Option<(usize, &str)>, want: &str) -> Result<()> {
    match got {
        Some((_, line)) if line == want => Ok(()),
        Some((n, line)) => Err(Error::parse(
            n,
            format!("expected header {want:?}, got {:?}", clip(line)),
        )),
        None => Err(Error::parse(1, format!("missing header {want:?}"))),
    }
}

/// Parse a complex sequence from `index,re,im` CSV. Indices must count up
/// from 0 and the file must hold at least one data row.
pub fn read_sequence(text: &str) -> Result<Vec<Complex64>> {
    let mut lines = numbered_lines(text);
    check_header(lines.next(), SEQUENCE_HEADER)?;
    let mut seq = Vec::new();
    let mut last_line = 1;
    for (n, line) in lines {
        last_line = n;
        let [idx, re, im] = fields(n, line)?;
        let idx: usize = parse_field(n, "index", idx)?;
        if idx != seq.len() {
            return Err(Error::parse(
                n,
                format!("index {idx} out of order, expected {}", seq.len()),
            ));
        }
        seq.push(Complex64::new(
            parse_finite(n, "re", re)?,
            parse_finite(n, "im", im)?,
        ));
    }
    if seq.is_empty() {
        return Err(Error::parse(last_line, "sequence holds no data rows"));
    }
    Ok(seq)
}

/// Render a complex sequence as `index,re,im` CSV.
pub fn write_sequence(seq: &[Complex64]) -> String {
    let mut out = String::from(SEQUENCE_HEADER);
    out.push('\n');
    for (i, z) in seq.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", format_f64(z.re), format_f64(z.im)));
    }
    out
}

/// Render transform output as `k,re,im,abs2` CSV.
pub fn write_transform_output(seq: &[Complex64]) -> String {
    let mut out = String::from(TRANSFORM_HEADER);
    out.push('\n');
    for (k, z) in seq.iter().enumerate() {
        out.push_str(&format!(
            "{k},{},{},{}\n",
            format_f64(z.re),
            format_f64(z.im),
            format_f64(z.norm_sqr())
        ));
    }
    out
}

/// Render photon-number statistics as `k,probability,error` CSV; the error
/// column is zero for exact (non-sampled) results.
pub fn write_statistics(stats: &PhotonStatistics) -> String {
    let mut out = String::from(STATISTICS_HEADER);
    out.push('\n');
    for (k, (p, e)) in stats.probabilities().iter().zip(stats.errors()).enumerate() {
        out.push_str(&format!("{k},{},{}\n", format_f64(*p), format_f64(*e)));
    }
    out
}

/// Render the nonzero histogram bins as `n1,n2,n3,n4,count` CSV in
/// ascending lexicographic order.
pub fn write_histogram_csv(histogram: &EventHistogram) -> String {
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    for ([n1, n2, n3, n4], count) in histogram.iter_nonzero() {
        out.push_str(&format!("{n1},{n2},{n3},{n4},{count}\n"));
    }
    out
}

/// JSON sidecar for a histogram dump: the full config snapshot plus run
/// totals, enough to reproduce the run.
pub fn histogram_sidecar_json(histogram: &EventHistogram) -> String {
    let nonzero = histogram.iter_nonzero().count();
    let value = serde_json::json!({
        "config": histogram.config(),
        "seed": histogram.seed(),
        "shots": histogram.shots(),
        "n_max": histogram.n_max(),
        "nonzero_bins": nonzero,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("sidecar serialization");
    text.push('\n');
    text
}

/// One parsed histogram row: the four detector counts and the event count.
pub type HistogramRow = ([u32; 4], u64);

/// Parse `n1,n2,n3,n4,count` CSV into rows. Structure only — bounds and
/// totals are the caller's concern.
pub fn read_histogram_csv(text: &str) -> Result<Vec<HistogramRow>> {
    let mut lines = numbered_lines(text);
    check_header(lines.next(), HISTOGRAM_HEADER)?;
    let mut rows = Vec::new();
    for (n, line) in lines {
        let [n1, n2, n3, n4, count] = fields(n, line)?;
        rows.push((
            [
                parse_field(n, "n1", n1)?,
                parse_field(n, "n2", n2)?,
                parse_field(n, "n3", n3)?,
                parse_field(n, "n4", n4)?,
            ],
            parse_field(n, "count", count)?,
        ));
    }
    Ok(rows)
}

/// Render a Q-function evaluation over a sphere grid as `theta,phi,q` CSV,
/// theta-major to match the evaluation order.
pub fn write_qfunction_csv(grid: &SphereGrid, values: &[f64]) -> Result<String> {
    if values.len() != grid.n_theta() * grid.n_phi() {
        return Err(Error::shape(format!(
            "grid is {}x{} but {} values were supplied",
            grid.n_theta(),
            grid.n_phi(),
            values.len()
        )));
    }
    let mut out = String::from(QFUNCTION_HEADER);
    out.push('\n');
    for i in 0..grid.n_theta() {
        for j in 0..grid.n_phi() {
            out.push_str(&format!(
                "{},{},{}\n",
                format_f64(grid.theta(i)),
                format_f64(grid.phi(j)),
                format_f64(values[i * grid.n_phi() + j])
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::ExperimentConfig;
    use crate::homsim::{photon_statistics, BeamSplitterSpec, TwoModeFockState};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn error_excerpts_respect_char_boundaries() {
        // a long run of multi-byte chars used to split the excerpt inside a
        // code point and panic while building the error message
        let wide = "ז".repeat(40);
        let err = read_sequence(&format!("index,re,im\n0,{wide},0\n")).unwrap_err();
        assert!(err.to_string().contains('ז'));
        let err = read_histogram_csv(&format!("n1,n2,n3,n4,count\n{wide},0,0,0,1\n")).unwrap_err();
        assert!(err.to_string().contains('ז'));
    }

    #[test]
    fn format_round_trips_f64() {
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..200 {
            let v: f64 = rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-12..12));
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v, "{v}");
        }
        assert_eq!(format_f64(0.0).parse::<f64>().unwrap(), 0.0);
    }

    #[test]
    fn sequence_round_trips_bitwise() {
        let mut rng = StdRng::seed_from_u64(9);
        let seq: Vec<Complex64> = (0..12)
            .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let text = write_sequence(&seq);
        assert!(text.starts_with("index,re,im\n"));
        assert_eq!(read_sequence(&text).unwrap(), seq);
        // CRLF input is tolerated
        let crlf = text.replace('\n', "\r\n");
        assert_eq!(read_sequence(&crlf).unwrap(), seq);
    }

    #[test]
    fn sequence_parser_reports_line_numbers() {
        let bad_header = "k,re,im\n0,1.0,0.0\n";
        assert!(matches!(read_sequence(bad_header), Err(Error::Parse { line: 1, .. })));

        let bad_fields = "index,re,im\n0,1.0,0.0\n1,2.0\n";
        assert!(matches!(read_sequence(bad_fields), Err(Error::Parse { line: 3, .. })));

        let bad_index = "index,re,im\n0,1.0,0.0\n2,0.0,0.0\n";
        assert!(matches!(read_sequence(bad_index), Err(Error::Parse { line: 3, .. })));

        let bad_float = "index,re,im\n0,one,0.0\n";
        assert!(matches!(read_sequence(bad_float), Err(Error::Parse { line: 2, .. })));

        let non_finite = "index,re,im\n0,nan,0.0\n";
        assert!(read_sequence(non_finite).is_err());

        assert!(read_sequence("index,re,im\n").is_err(), "no data rows");
        assert!(read_sequence("").is_err(), "empty input");
    }

    #[test]
    fn transform_output_carries_abs2() {
        let seq = [Complex64::new(0.6, -0.8), Complex64::new(0.0, 0.5)];
        let text = write_transform_output(&seq);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,re,im,abs2");
        let abs2: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
        assert!((abs2 - 1.0).abs() < 1e-15);
        assert!(lines[2].starts_with("1,"));
    }

    #[test]
    fn statistics_csv_is_exact_with_zero_errors() {
        let state = TwoModeFockState::fock(2, 1).unwrap();
        let bs = BeamSplitterSpec::kt(0.5).unwrap();
        let stats = photon_statistics(&state, &bs).unwrap();
        let text = write_statistics(&stats);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,probability,error");
        assert_eq!(lines.len(), 4);
        for row in &lines[1..] {
            let err: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
            assert_eq!(err, 0.0);
        }
    }

    #[test]
    fn histogram_csv_and_sidecar_round_trip() {
        let config = ExperimentConfig::lossless(0.2, 0.5, 400, 7).unwrap();
        let histogram = crate::experiment::run_experiment(&config).unwrap();
        let text = write_histogram_csv(&histogram);
        let rows = read_histogram_csv(&text).unwrap();
        let expected: Vec<HistogramRow> = histogram
            .iter_nonzero()
            .map(|([a, b, c, d], count)| ([a as u32, b as u32, c as u32, d as u32], count))
            .collect();
        assert_eq!(rows, expected);
        assert_eq!(rows.iter().map(|(_, c)| c).sum::<u64>(), 400);

        let sidecar = histogram_sidecar_json(&histogram);
        let value: serde_json::Value = serde_json::from_str(&sidecar).unwrap();
        assert_eq!(value["shots"], 400);
        assert_eq!(value["seed"], 7);
        assert_eq!(value["nonzero_bins"], rows.len());
        assert!(value["config"]["sources"].is_object());
    }

    #[test]
    fn histogram_parser_rejects_defects() {
        assert!(read_histogram_csv("").is_err());
        assert!(read_histogram_csv("n1,n2,n3,n4\n").is_err());
        let bad = "n1,n2,n3,n4,count\n0,0,0\n";
        assert!(matches!(read_histogram_csv(bad), Err(Error::Parse { line: 2, .. })));
        let negative = "n1,n2,n3,n4,count\n0,0,0,-1,5\n";
        assert!(read_histogram_csv(negative).is_err());
    }

    #[test]
    fn qfunction_csv_shape_checked() {
        let grid = SphereGrid::new(3, 4).unwrap();
        let values = vec![0.25; 12];
        let text = write_qfunction_csv(&grid, &values).unwrap();
        assert_eq!(text.lines().count(), 13);
        assert!(text.starts_with("theta,phi,q\n"));
        assert!(write_qfunction_csv(&grid, &values[..7]).is_err());
    }
}
