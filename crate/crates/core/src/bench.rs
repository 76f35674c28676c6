//! Compression-ratio benchmark over the standard codec configurations.

use std::io::Write;
use std::time::Instant;

use crate::codec::{
    decode_with_stats, encode_intra_only, encode_sequence, CodecParams, EncodeError,
};
use crate::frame::CfaFrame;

pub const CSV_HEADER: [&str; 7] = [
    "config",
    "frames",
    "s_in_bytes",
    "s_out_bytes",
    "cr",
    "smooth_pct",
    "encode_ms",
];

/// One benchmarked configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    pub name: &'static str,
    pub params: CodecParams,
    /// Code every frame intra instead of using motion compensation.
    pub intra_only: bool,
}

/// The four smooth × recode combinations plus the intra-only baseline.
/// Block size, radius, threshold and search mode come from `base`.
pub fn standard_configs(base: &CodecParams) -> Vec<BenchConfig> {
    let with = |smooth, recode_residuals| CodecParams {
        smooth,
        recode_residuals,
        ..*base
    };
    vec![
        BenchConfig {
            name: "smooth",
            params: with(true, false),
            intra_only: false,
        },
        BenchConfig {
            name: "smooth+recode",
            params: with(true, true),
            intra_only: false,
        },
        BenchConfig {
            name: "motion",
            params: with(false, false),
            intra_only: false,
        },
        BenchConfig {
            name: "motion+recode",
            params: with(false, true),
            intra_only: false,
        },
        BenchConfig {
            name: "intra-baseline",
            params: with(false, false),
            intra_only: true,
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub config: String,
    pub frames: usize,
    pub s_in: u64,
    pub s_out: u64,
    pub smooth_pct: f64,
    pub encode_ms: f64,
    /// Whether decoding reproduced the input exactly. Rows that failed carry
    /// no compression ratio.
    pub lossless: bool,
}

impl BenchRow {
    pub fn compression_ratio(&self) -> Option<f64> {
        self.lossless.then(|| self.s_in as f64 / self.s_out as f64)
    }

    fn csv_record(&self) -> [String; 7] {
        [
            self.config.clone(),
            self.frames.to_string(),
            self.s_in.to_string(),
            self.s_out.to_string(),
            self.compression_ratio()
                .map_or_else(|| "FAILED".to_string(), |cr| format!("{cr:.2}")),
            format!("{:.1}", self.smooth_pct),
            format!("{:.1}", self.encode_ms),
        ]
    }
}

/// Encodes `frames` under one configuration and checks the round trip.
pub fn run_config(frames: &[CfaFrame], config: &BenchConfig) -> Result<BenchRow, EncodeError> {
    let start = Instant::now();
    let bytes = if config.intra_only {
        encode_intra_only(frames, &config.params)?
    } else {
        encode_sequence(frames, &config.params)?
    };
    let encode_ms = start.elapsed().as_secs_f64() * 1e3;
    let s_in = frames.iter().map(|f| (f.width() * f.height()) as u64).sum();
    let row = match decode_with_stats(&bytes) {
        Ok((decoded, stats)) => BenchRow {
            config: config.name.to_string(),
            frames: frames.len(),
            s_in,
            s_out: bytes.len() as u64,
            smooth_pct: stats.smooth_pct(),
            encode_ms,
            lossless: decoded == frames,
        },
        Err(_) => BenchRow {
            config: config.name.to_string(),
            frames: frames.len(),
            s_in,
            s_out: bytes.len() as u64,
            smooth_pct: 0.0,
            encode_ms,
            lossless: false,
        },
    };
    Ok(row)
}

/// Runs every configuration from [`standard_configs`].
pub fn run_bench(frames: &[CfaFrame], base: &CodecParams) -> Result<Vec<BenchRow>, EncodeError> {
    standard_configs(base)
        .iter()
        .map(|c| run_config(frames, c))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

/// Aligned text table of configuration and CR, for terminal output.
pub fn format_table(rows: &[BenchRow]) -> String {
    let mut s = format!(
        "{:<16} {:>8} {:>12} {:>12} {:>8} {:>8}\n",
        "config", "frames", "s_in", "s_out", "CR", "smooth%"
    );
    for row in rows {
        let cr = row
            .compression_ratio()
            .map_or_else(|| "FAILED".to_string(), |cr| format!("{cr:.2}"));
        s += &format!(
            "{:<16} {:>8} {:>12} {:>12} {:>8} {:>8.1}\n",
            row.config, row.frames, row.s_in, row.s_out, cr, row.smooth_pct
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::BayerPattern;
    use crate::synth::{tissue_frame, TextureParams};

    #[test]
    fn five_configs() {
        let names: Vec<_> = standard_configs(&CodecParams::default())
            .iter()
            .map(|c| c.name)
            .collect();
        assert_eq!(
            names,
            [
                "smooth",
                "smooth+recode",
                "motion",
                "motion+recode",
                "intra-baseline"
            ]
        );
    }

    #[test]
    fn failed_rows_have_no_ratio() {
        let row = BenchRow {
            config: "x".into(),
            frames: 1,
            s_in: 100,
            s_out: 50,
            smooth_pct: 0.0,
            encode_ms: 1.0,
            lossless: false,
        };
        assert_eq!(row.compression_ratio(), None);
        assert_eq!(row.csv_record()[4], "FAILED");
    }

    #[test]
    fn single_frame_rows_agree() {
        let f = tissue_frame(40, 40, BayerPattern::Rggb, TextureParams::default(), 5);
        let rows = run_bench(&[f], &CodecParams::default()).unwrap();
        assert_eq!(rows.len(), 5);
        let sizes: Vec<_> = rows.iter().map(|r| r.s_out).collect();
        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "{sizes:?}");
        assert!(rows.iter().all(|r| r.lossless));
    }

    #[test]
    fn csv_layout() {
        let row = BenchRow {
            config: "motion".into(),
            frames: 10,
            s_in: 2_304_000,
            s_out: 230_400,
            smooth_pct: 12.3,
            encode_ms: 3.0,
            lossless: true,
        };
        let mut buf = Vec::new();
        write_csv(&[row], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "config,frames,s_in_bytes,s_out_bytes,cr,smooth_pct,encode_ms\nmotion,10,2304000,230400,10.00,12.3,3.0\n"
        );
    }
}
