//! Human-readable summary of one feature file: shape, value ranges per
//! layer, and the sidecar metadata if present.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Axis;

use mrpcen_core::npy::read_npy_f32;

use crate::features::read_sidecar;

/// Prints a feature-file summary; returns the process exit code.
pub fn run(file: &Path) -> anyhow::Result<i32> {
    print!("{}", render(file)?);
    Ok(0)
}

/// Builds the summary text, separated from stdout for tests.
pub fn render(file: &Path) -> anyhow::Result<String> {
    let tensor = read_npy_f32(file)?;
    let mut out = String::new();
    writeln!(out, "file: {}", file.display())?;
    writeln!(out, "shape: {:?}", tensor.shape())?;
    writeln!(out, "elements: {}", tensor.len())?;
    let (min, mean, max) = stats(tensor.iter().copied());
    writeln!(out, "values: min {min:.6} mean {mean:.6} max {max:.6}")?;

    if tensor.ndim() == 3 && tensor.shape()[2] > 1 {
        for (k, layer) in tensor.axis_iter(Axis(2)).enumerate() {
            let (min, mean, max) = stats(layer.iter().copied());
            writeln!(out, "layer {k}: min {min:.6} mean {mean:.6} max {max:.6}")?;
        }
    }

    let sidecar_path = file.with_extension("json");
    if sidecar_path.exists() {
        let sidecar = read_sidecar(&sidecar_path)?;
        writeln!(out, "clip_id: {}", sidecar.clip_id)?;
        writeln!(out, "config_hash: {}", sidecar.config_hash)?;
        writeln!(out, "frame_rate: {}", sidecar.frame_rate)?;
        writeln!(out, "schedule: {:?}", sidecar.schedule)?;
    } else {
        writeln!(out, "sidecar: none")?;
    }
    Ok(out)
}

fn stats(values: impl Iterator<Item = f32>) -> (f32, f64, f32) {
    let mut min = f32::INFINITY;
    let mut max = f32::NEG_INFINITY;
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for v in values {
        min = min.min(v);
        max = max.max(v);
        sum += f64::from(v);
        count += 1;
    }
    let mean = if count == 0 { f64::NAN } else { sum / count as f64 };
    (min, mean, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{write_feature, Sidecar};
    use ndarray::Array3;

    #[test]
    fn summarizes_shape_layers_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let mut tensor = Array3::<f32>::zeros((4, 5, 2));
        tensor[[0, 0, 0]] = -1.5;
        tensor[[3, 4, 1]] = 3.0;
        let sidecar = Sidecar {
            clip_id: "demo".into(),
            config_hash: "abc123".into(),
            schedule: vec![2.0, 16.0],
            frame_rate: 86.0,
        };
        write_feature(dir.path(), "demo", &tensor, &sidecar).unwrap();

        let text = render(&dir.path().join("demo.npy")).unwrap();
        assert!(text.contains("shape: [4, 5, 2]"));
        assert!(text.contains("layer 0:"));
        assert!(text.contains("layer 1:"));
        assert!(text.contains("min -1.5"));
        assert!(text.contains("max 3.0"));
        assert!(text.contains("config_hash: abc123"));
        assert!(text.contains("schedule: [2.0, 16.0]"));
    }

    #[test]
    fn works_without_a_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let tensor = Array3::<f32>::ones((2, 3, 1));
        let path = dir.path().join("bare.npy");
        mrpcen_core::npy::write_npy_f32(&path, tensor.view().into_dyn()).unwrap();

        let text = render(&path).unwrap();
        assert!(text.contains("sidecar: none"));
        assert!(!text.contains("layer 0"));
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(render(Path::new("/nonexistent/x.npy")).is_err());
    }
}
