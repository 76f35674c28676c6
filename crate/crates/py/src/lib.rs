//! Python bindings for the WCEC codec.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use wcec_core::classifier::classify_frame as core_classify;
use wcec_core::entropy::{zigzag_map as core_zigzag_map, zigzag_unmap as core_zigzag_unmap};
use wcec_core::frame::{self as core_frame, RgbFrame};
use wcec_core::motion::candidate_offsets as core_candidates;
use wcec_core::{BayerPattern, BlockLabel, CodecParams, SearchMode, SearchParams, Threshold};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_pattern(s: &str) -> PyResult<BayerPattern> {
    s.parse().map_err(value_err)
}

/// Single-channel Bayer CFA frame.
#[pyclass(name = "CfaFrame", module = "wcec", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyCfaFrame(core_frame::CfaFrame);

#[pymethods]
impl PyCfaFrame {
    #[new]
    #[pyo3(signature = (width, height, samples, pattern = "rggb"))]
    fn new(width: usize, height: usize, samples: Vec<u8>, pattern: &str) -> PyResult<Self> {
        core_frame::CfaFrame::new(width, height, parse_pattern(pattern)?, samples)
            .map(Self)
            .map_err(value_err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    #[getter]
    fn pattern(&self) -> &'static str {
        self.0.pattern().name()
    }

    /// Row-major samples as `bytes`.
    #[getter]
    fn samples<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.0.samples())
    }

    fn get(&self, row: usize, col: usize) -> PyResult<u8> {
        if row >= self.0.height() || col >= self.0.width() {
            return Err(PyValueError::new_err(format!(
                "({row}, {col}) is outside the frame"
            )));
        }
        Ok(self.0.get(row, col))
    }

    fn __repr__(&self) -> String {
        format!(
            "CfaFrame({}x{}, {})",
            self.0.width(),
            self.0.height(),
            self.0.pattern()
        )
    }
}

fn unwrap_frames(frames: Vec<PyRef<'_, PyCfaFrame>>) -> Vec<core_frame::CfaFrame> {
    frames.iter().map(|f| f.0.clone()).collect()
}

fn codec_params(
    block_size: usize,
    search_radius: usize,
    threshold: f64,
    smooth: bool,
    cfa_phase: bool,
    recode_residuals: bool,
) -> PyResult<CodecParams> {
    let params = CodecParams {
        block_size,
        search_radius,
        threshold: Threshold::from_f64(threshold)
            .ok_or_else(|| PyValueError::new_err(format!("invalid threshold {threshold}")))?,
        smooth,
        cfa_phase,
        recode_residuals,
    };
    params.validate().map_err(value_err)?;
    Ok(params)
}

#[pyfunction]
fn parse_pgm(data: &[u8]) -> PyResult<PyCfaFrame> {
    core_frame::parse_pgm(data)
        .map(PyCfaFrame)
        .map_err(value_err)
}

#[pyfunction]
fn emit_pgm<'py>(py: Python<'py>, frame: &PyCfaFrame) -> Bound<'py, PyBytes> {
    PyBytes::new(py, &core_frame::emit_pgm(&frame.0))
}

/// Mosaics interleaved 8-bit RGB (`width * height * 3` bytes).
#[pyfunction]
#[pyo3(signature = (width, height, rgb, pattern = "rggb"))]
fn mosaic(width: usize, height: usize, rgb: &[u8], pattern: &str) -> PyResult<PyCfaFrame> {
    if rgb.len() != width * height * 3 {
        return Err(PyValueError::new_err(format!(
            "expected {} RGB bytes, got {}",
            width * height * 3,
            rgb.len()
        )));
    }
    let pixels = rgb.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect();
    let frame = RgbFrame::new(width, height, pixels).map_err(value_err)?;
    core_frame::mosaic(&frame, parse_pattern(pattern)?)
        .map(PyCfaFrame)
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (
    frames, block_size = 5, search_radius = 3, threshold = 10.0,
    smooth = true, cfa_phase = false, recode_residuals = false,
))]
#[allow(clippy::too_many_arguments)]
fn encode_sequence<'py>(
    py: Python<'py>,
    frames: Vec<PyRef<'py, PyCfaFrame>>,
    block_size: usize,
    search_radius: usize,
    threshold: f64,
    smooth: bool,
    cfa_phase: bool,
    recode_residuals: bool,
) -> PyResult<Bound<'py, PyBytes>> {
    let params = codec_params(
        block_size,
        search_radius,
        threshold,
        smooth,
        cfa_phase,
        recode_residuals,
    )?;
    let frames = unwrap_frames(frames);
    let bytes = py
        .detach(|| wcec_core::encode_sequence(&frames, &params))
        .map_err(value_err)?;
    Ok(PyBytes::new(py, &bytes))
}

#[pyfunction]
fn decode_sequence(py: Python<'_>, data: &[u8]) -> PyResult<Vec<PyCfaFrame>> {
    let data = data.to_vec();
    let frames = py
        .detach(|| wcec_core::decode_sequence(&data))
        .map_err(value_err)?;
    Ok(frames.into_iter().map(PyCfaFrame).collect())
}

/// Container sizes, compression ratio and per-frame statistics as a dict.
#[pyfunction]
fn stream_stats<'py>(py: Python<'py>, data: &[u8]) -> PyResult<Bound<'py, PyDict>> {
    let stats = wcec_core::stream_stats(data).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("width", stats.width)?;
    d.set_item("height", stats.height)?;
    d.set_item("frames", stats.frame_count())?;
    d.set_item("s_in", stats.s_in)?;
    d.set_item("s_out", stats.s_out)?;
    d.set_item("cr", stats.compression_ratio())?;
    d.set_item("smooth_pct", stats.smooth_pct())?;
    let per_frame = stats
        .frames
        .iter()
        .map(|f| {
            let fd = PyDict::new(py);
            fd.set_item("kind", format!("{:?}", f.kind).to_lowercase())?;
            fd.set_item("payload_bytes", f.payload_bytes)?;
            fd.set_item("blocks", f.blocks)?;
            fd.set_item("smooth_blocks", f.smooth_blocks)?;
            Ok(fd)
        })
        .collect::<PyResult<Vec<_>>>()?;
    d.set_item("frame_stats", per_frame)?;
    Ok(d)
}

/// Per-block smooth flags in raster order.
#[pyfunction]
#[pyo3(signature = (frame, block_size = 5, threshold = 10.0))]
fn classify_frame(frame: &PyCfaFrame, block_size: usize, threshold: f64) -> PyResult<Vec<bool>> {
    if block_size == 0 {
        return Err(PyValueError::new_err("block_size must be positive"));
    }
    let threshold = Threshold::from_f64(threshold)
        .ok_or_else(|| PyValueError::new_err(format!("invalid threshold {threshold}")))?;
    Ok(core_classify(&frame.0, block_size, threshold)
        .into_iter()
        .map(|l| l == BlockLabel::Smooth)
        .collect())
}

/// Motion-search offsets `(dx, dy)` in search order.
#[pyfunction]
#[pyo3(signature = (radius, cfa_phase = false))]
fn candidate_offsets(radius: usize, cfa_phase: bool) -> Vec<(i32, i32)> {
    core_candidates(&SearchParams {
        radius,
        mode: if cfa_phase {
            SearchMode::CfaPhase
        } else {
            SearchMode::Full
        },
        ..SearchParams::default()
    })
}

#[pyfunction]
fn zigzag_map(v: i32) -> u32 {
    core_zigzag_map(v)
}

#[pyfunction]
fn zigzag_unmap(u: u32) -> i32 {
    core_zigzag_unmap(u)
}

/// Runs the standard configurations and returns one dict per CSV row.
#[pyfunction]
#[pyo3(signature = (frames, block_size = 5, search_radius = 3, threshold = 10.0, cfa_phase = false))]
fn run_bench<'py>(
    py: Python<'py>,
    frames: Vec<PyRef<'py, PyCfaFrame>>,
    block_size: usize,
    search_radius: usize,
    threshold: f64,
    cfa_phase: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let params = codec_params(block_size, search_radius, threshold, true, cfa_phase, false)?;
    let frames = unwrap_frames(frames);
    let rows = py
        .detach(|| wcec_core::bench::run_bench(&frames, &params))
        .map_err(value_err)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("config", &r.config)?;
            d.set_item("frames", r.frames)?;
            d.set_item("s_in_bytes", r.s_in)?;
            d.set_item("s_out_bytes", r.s_out)?;
            d.set_item("cr", r.compression_ratio())?;
            d.set_item("smooth_pct", r.smooth_pct)?;
            d.set_item("encode_ms", r.encode_ms)?;
            d.set_item("lossless", r.lossless)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn wcec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCfaFrame>()?;
    m.add_function(wrap_pyfunction!(parse_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(emit_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(mosaic, m)?)?;
    m.add_function(wrap_pyfunction!(encode_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(decode_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(stream_stats, m)?)?;
    m.add_function(wrap_pyfunction!(classify_frame, m)?)?;
    m.add_function(wrap_pyfunction!(candidate_offsets, m)?)?;
    m.add_function(wrap_pyfunction!(zigzag_map, m)?)?;
    m.add_function(wrap_pyfunction!(zigzag_unmap, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    Ok(())
}
