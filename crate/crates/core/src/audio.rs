//! Audio clips and WAV file I/O.
//!
//! Clips are mono `f64` sample buffers tagged with their sample rate. WAV
//! decoding accepts 16/24/32-bit integer PCM and 32-bit float, averages
//! multi-channel material down to mono, and never resamples: a clip whose
//! rate differs from the pipeline's must be rejected by the caller, not
//! silently converted.

use std::path::Path;

use crate::error::{CoreError, Result};

/// A mono audio clip: finite samples at a fixed sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioClip {
    /// Wraps raw samples. Rejects empty buffers, a zero sample rate, and
    /// non-finite samples.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(CoreError::InvalidParam("sample_rate must be > 0".into()));
        }
        if samples.is_empty() {
            return Err(CoreError::EmptyInput("audio clip has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(CoreError::NonFinite(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Largest absolute sample value.
    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |acc, s| acc.max(s.abs()))
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

// ===== WAV decode =====

/// Reads a WAV file into a mono clip.
///
/// Integer PCM samples are scaled by `1 / 2^(bits-1)`, so the most negative
/// code maps to exactly -1.0. 32-bit float samples are taken as-is.
/// Multi-channel audio is averaged across channels per frame.
pub fn load_wav(path: &Path) -> Result<AudioClip> {
    let reader = hound::WavReader::open(path).map_err(|e| map_hound_err(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(CoreError::MalformedWav {
            path: path.to_path_buf(),
            detail: "zero channels".into(),
        });
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from).map_err(|e| map_hound_err(path, e)))
            .collect::<Result<_>>()?,
        (hound::SampleFormat::Int, bits @ (16 | 24 | 32)) => {
            let scale = 1.0 / f64::from(1u32 << (bits - 1));
            reader
                .into_samples::<i32>()
                .map(|s| {
                    s.map(|v| f64::from(v) * scale)
                        .map_err(|e| map_hound_err(path, e))
                })
                .collect::<Result<_>>()?
        }
        (fmt, bits) => {
            return Err(CoreError::UnsupportedWav {
                path: path.to_path_buf(),
                detail: format!("{bits}-bit {fmt:?} samples"),
            })
        }
    };

    if interleaved.is_empty() {
        return Err(CoreError::EmptyInput(format!(
            "WAV file {} contains no samples",
            path.display()
        )));
    }

    let mono: Vec<f64> = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks(channels)
            .map(|frame| frame.iter().sum::<f64>() / frame.len() as f64)
            .collect()
    };

    AudioClip::new(mono, spec.sample_rate)
}

/// Frame count and sample rate from a WAV header, without decoding samples.
pub fn wav_info(path: &Path) -> Result<(usize, u32)> {
    let reader = hound::WavReader::open(path).map_err(|e| map_hound_err(path, e))?;
    let spec = reader.spec();
    if spec.channels == 0 || spec.sample_rate == 0 {
        return Err(CoreError::MalformedWav {
            path: path.to_path_buf(),
            detail: "zero channels or sample rate".into(),
        });
    }
    Ok((reader.duration() as usize, spec.sample_rate))
}

fn map_hound_err(path: &Path, err: hound::Error) -> CoreError {
    let path = path.to_path_buf();
    match err {
        hound::Error::IoError(source) => CoreError::Io { path, source },
        hound::Error::FormatError(detail) => CoreError::MalformedWav {
            path,
            detail: detail.to_string(),
        },
        hound::Error::Unsupported => CoreError::UnsupportedWav {
            path,
            detail: "codec not supported".into(),
        },
        other => CoreError::MalformedWav {
            path,
            detail: other.to_string(),
        },
    }
}

// ===== WAV encode =====

/// Writes a mono clip as 32-bit float WAV. Lossless for samples that fit f32.
pub fn write_wav_f32(path: &Path, samples: &[f64], sample_rate: u32) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| map_hound_err(path, e))?;
    for &s in samples {
        writer
            .write_sample(s as f32)
            .map_err(|e| map_hound_err(path, e))?;
    }
    writer.finalize().map_err(|e| map_hound_err(path, e))
}

/// Writes a mono clip as 16-bit PCM WAV. Samples are clamped to [-1, 1] and
/// scaled by 32767 so the encode cannot overflow.
pub fn write_wav_i16(path: &Path, samples: &[f64], sample_rate: u32) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| map_hound_err(path, e))?;
    for &s in samples {
        let q = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        writer
            .write_sample(q)
            .map_err(|e| map_hound_err(path, e))?;
    }
    writer.finalize().map_err(|e| map_hound_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmp(name: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        (dir, path)
    }

    #[test]
    fn wav_info_reads_header_only() {
        let (_d, path) = tmp("info.wav");
        write_wav_i16(&path, &vec![0.25; 12_345], 22_050).unwrap();
        assert_eq!(wav_info(&path).unwrap(), (12_345, 22_050));
        assert!(wav_info(Path::new("/nonexistent.wav")).is_err());
    }

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(matches!(
            AudioClip::new(vec![], 44100),
            Err(CoreError::EmptyInput(_))
        ));
        assert!(matches!(
            AudioClip::new(vec![0.0, f64::NAN], 44100),
            Err(CoreError::NonFinite(_))
        ));
        assert!(matches!(
            AudioClip::new(vec![0.0], 0),
            Err(CoreError::InvalidParam(_))
        ));
    }

    #[test]
    fn pcm16_full_scale_negative_maps_to_minus_one() {
        let (_d, path) = tmp("fs.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        for v in [i16::MIN, 0, i16::MAX] {
            w.write_sample(v).unwrap();
        }
        w.finalize().unwrap();

        let clip = load_wav(&path).unwrap();
        assert_eq!(clip.sample_rate(), 8000);
        assert_eq!(clip.samples()[0], -1.0);
        assert_eq!(clip.samples()[1], 0.0);
        assert_eq!(clip.samples()[2], 32767.0 / 32768.0);
    }

    #[test]
    fn stereo_averages_to_mono() {
        let (_d, path) = tmp("st.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        // One frame: +0.5 left, -0.5 right.
        w.write_sample(0.5f32).unwrap();
        w.write_sample(-0.5f32).unwrap();
        w.finalize().unwrap();

        let clip = load_wav(&path).unwrap();
        assert_eq!(clip.len(), 1);
        assert_eq!(clip.samples()[0], 0.0);
    }

    #[test]
    fn float32_roundtrip_and_24bit_scaling() {
        let (_d, path) = tmp("f32.wav");
        let samples = vec![0.25, -0.75, 0.0, 1.0];
        write_wav_f32(&path, &samples, 44100).unwrap();
        let clip = load_wav(&path).unwrap();
        assert_eq!(clip.samples(), samples.as_slice());

        let (_d24, path24) = tmp("i24.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 44100,
            bits_per_sample: 24,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path24, spec).unwrap();
        w.write_sample(-(1i32 << 23)).unwrap();
        w.write_sample(1i32 << 22).unwrap();
        w.finalize().unwrap();
        let clip = load_wav(&path24).unwrap();
        assert_eq!(clip.samples()[0], -1.0);
        assert_eq!(clip.samples()[1], 0.5);
    }

    #[test]
    fn i16_writer_roundtrips_within_quantization() {
        let (_d, path) = tmp("q.wav");
        let samples: Vec<f64> = (0..100).map(|i| (i as f64 / 50.0 - 1.0) * 0.9).collect();
        write_wav_i16(&path, &samples, 22050).unwrap();
        let clip = load_wav(&path).unwrap();
        // The writer scales by 32767, the reader by 1/32768, so the error
        // bound is one rounding step plus one part in 32768 of the value.
        for (a, b) in clip.samples().iter().zip(&samples) {
            assert!((a - b).abs() < 2.0 / 32768.0, "{a} vs {b}");
        }
    }

    #[test]
    fn malformed_header_is_reported() {
        let (_d, path) = tmp("bad.wav");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(b"RIFFxxxxWAVEjunkjunkjunk").unwrap();
        drop(f);
        match load_wav(&path) {
            Err(CoreError::MalformedWav { .. } | CoreError::Io { .. }) => {}
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        match load_wav(Path::new("/nonexistent/nope.wav")) {
            Err(CoreError::Io { .. }) => {}
            other => panic!("expected io error, got {other:?}"),
        }
    }

    #[test]
    fn unsupported_bit_depth_is_distinct() {
        let (_d, path) = tmp("u8.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 8,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        w.write_sample(0i8).unwrap();
        w.finalize().unwrap();
        match load_wav(&path) {
            Err(CoreError::UnsupportedWav { .. }) => {}
            other => panic!("expected unsupported-encoding error, got {other:?}"),
        }
    }
}
