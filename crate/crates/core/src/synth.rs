//! Seeded synthetic gait streams with ground-truth mode and phase.
//!
//! Each channel is an offset plus three harmonics of the stride phase. The
//! shipped profiles are synthetic stand-ins for real kinematics: smooth,
//! periodic and distinct, with two pairs of neighbouring walking speeds that
//! differ only slightly. Stride lengths at 230 Hz are 392 samples for `Slow`
//! and 280 for `Fast`, matching typical measured kernel lengths.
//!
//! The right foot angle, used only for heel-strike detection, is a narrow
//! bump peaking at each heel strike; the left foot is the same bump half a
//! stride later.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::frame::{ModeId, SampleFrame, CHANNELS};
use crate::stream::{Label, LabeledStream};

pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 230.0;

/// One sinusoidal term `amp * sin(2 pi * harmonic * phase + phase_rad)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub amp_deg: f64,
    pub harmonic: u32,
    pub phase_rad: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub offset_deg: f64,
    pub harmonics: [Harmonic; 3],
}

impl ChannelParams {
    fn eval(&self, u: f64) -> f64 {
        self.offset_deg
            + self
                .harmonics
                .iter()
                .map(|h| h.amp_deg * libm::sin(2.0 * PI * h.harmonic as f64 * u + h.phase_rad))
                .sum::<f64>()
    }

    /// Same trajectory delayed by half a stride.
    fn half_cycle_shift(&self) -> Self {
        let mut out = *self;
        for h in &mut out.harmonics {
            h.phase_rad -= PI * h.harmonic as f64;
        }
        out
    }
}

/// Trajectory family for one synthetic locomotion mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    pub mode_id: ModeId,
    pub period_s: f64,
    /// In channel order: right thigh, left thigh, right shank, left shank.
    pub channels: [ChannelParams; CHANNELS],
}

impl ModeProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.period_s.is_finite() && self.period_s > 0.0) {
            return Err(Error::arg(alloc::format!("profile {}: period must be positive", self.mode_id)));
        }
        for ch in &self.channels {
            if !ch.offset_deg.is_finite() {
                return Err(Error::NonFinite("profile offset"));
            }
            for h in &ch.harmonics {
                if !(h.amp_deg.is_finite() && h.amp_deg >= 0.0 && h.phase_rad.is_finite()) {
                    return Err(Error::arg(alloc::format!(
                        "profile {}: amplitudes must be finite and non-negative",
                        self.mode_id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Noise-free angles at stride phase `u` in `[0, 1)`.
    pub fn angles_at(&self, u: f64) -> [f64; CHANNELS] {
        core::array::from_fn(|c| self.channels[c].eval(u))
    }
}

/// Generation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub sample_rate_hz: f64,
    pub noise_sigma_deg: f64,
    /// Each stride's period is scaled by `1 + U(-j, +j)`; `j` in `[0, 0.2]`.
    pub cadence_jitter_frac: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ, noise_sigma_deg: 0.0, cadence_jitter_frac: 0.0, seed: 0 }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::arg("sample rate must be positive"));
        }
        if !(self.noise_sigma_deg.is_finite() && self.noise_sigma_deg >= 0.0) {
            return Err(Error::arg("noise sigma must be non-negative"));
        }
        if !(0.0..=0.2).contains(&self.cadence_jitter_frac) {
            return Err(Error::arg("cadence jitter must lie in [0, 0.2]"));
        }
        Ok(())
    }
}

fn h(amp_deg: f64, harmonic: u32, phase_rad: f64) -> Harmonic {
    Harmonic { amp_deg, harmonic, phase_rad }
}

fn profile(id: &str, samples_at_230: u32, thigh: ChannelParams, shank: ChannelParams) -> ModeProfile {
    ModeProfile {
        mode_id: ModeId::new(id).expect("static mode id"),
        period_s: samples_at_230 as f64 / DEFAULT_SAMPLE_RATE_HZ,
        channels: [thigh, thigh.half_cycle_shift(), shank, shank.half_cycle_shift()],
    }
}

fn level_walk(id: &str, samples: u32, scale: f64, tweak: f64) -> ModeProfile {
    let thigh = ChannelParams {
        offset_deg: 8.0 + 2.0 * tweak,
        harmonics: [h(22.0 * scale, 1, 0.0), h(4.0 * scale, 2, 1.2 + 0.15 * tweak), h(1.5, 3, 0.4)],
    };
    let shank = ChannelParams {
        offset_deg: -12.0 - 1.5 * tweak,
        harmonics: [h(30.0 * scale, 1, 1.9), h(10.0 * scale, 2, -0.6 + 0.1 * tweak), h(3.0, 3, 2.2)],
    };
    profile(id, samples, thigh, shank)
}

/// The seven shipped modes: `Slow`, `Med`, `Fast`, `RA`, `RD`, `SA`, `SD`.
///
/// `Slow`/`Med` and `Med`/`Fast` are the near-identical speed neighbours.
pub fn default_profiles() -> Vec<ModeProfile> {
    alloc::vec![
        level_walk("Slow", 392, 0.92, -1.0),
        level_walk("Med", 336, 1.0, 0.0),
        level_walk("Fast", 280, 1.08, 1.0),
        profile(
            "RA",
            372,
            ChannelParams { offset_deg: 16.0, harmonics: [h(24.0, 1, 0.2), h(5.0, 2, 1.0), h(2.0, 3, 0.6)] },
            ChannelParams { offset_deg: -8.0, harmonics: [h(28.0, 1, 2.1), h(12.0, 2, -0.3), h(3.0, 3, 2.0)] },
        ),
        profile(
            "RD",
            352,
            ChannelParams { offset_deg: 2.0, harmonics: [h(18.0, 1, -0.2), h(3.0, 2, 1.6), h(1.0, 3, 0.2)] },
            ChannelParams { offset_deg: -18.0, harmonics: [h(33.0, 1, 1.6), h(8.0, 2, -1.0), h(4.0, 3, 2.6)] },
        ),
        profile(
            "SA",
            426,
            ChannelParams { offset_deg: 28.0, harmonics: [h(30.0, 1, 0.5), h(6.0, 2, 0.6), h(2.0, 3, 1.0)] },
            ChannelParams { offset_deg: 5.0, harmonics: [h(26.0, 1, 2.5), h(9.0, 2, 0.4), h(3.0, 3, 1.5)] },
        ),
        profile(
            "SD",
            404,
            ChannelParams { offset_deg: 10.0, harmonics: [h(16.0, 1, -0.5), h(7.0, 2, 2.0), h(2.0, 3, -0.4)] },
            ChannelParams { offset_deg: -22.0, harmonics: [h(36.0, 1, 1.3), h(11.0, 2, -1.4), h(5.0, 3, 2.9)] },
        ),
    ]
}

/// Look up a profile by mode id.
pub fn find_profile<'a>(profiles: &'a [ModeProfile], id: &str) -> Option<&'a ModeProfile> {
    profiles.iter().find(|p| p.mode_id.as_str() == id)
}

const FOOT_KAPPA: f64 = 60.0;

fn foot_angle(u: f64) -> f64 {
    -10.0 + 30.0 * libm::exp(FOOT_KAPPA * (libm::cos(2.0 * PI * u) - 1.0))
}

struct Generator {
    rng: ChaCha8Rng,
    noise: Option<Normal<f64>>,
    cfg: GenConfig,
    next_t: u64,
}

impl Generator {
    fn new(cfg: &GenConfig) -> Result<Self> {
        cfg.validate()?;
        let noise = if cfg.noise_sigma_deg > 0.0 {
            Some(Normal::new(0.0, cfg.noise_sigma_deg).map_err(|_| Error::arg("bad noise sigma"))?)
        } else {
            None
        };
        Ok(Generator { rng: ChaCha8Rng::seed_from_u64(cfg.seed), noise, cfg: *cfg, next_t: 0 })
    }

    fn stride_len(&mut self, base: f64) -> f64 {
        let j = self.cfg.cadence_jitter_frac;
        if j > 0.0 {
            base * (1.0 + self.rng.random_range(-j..=j))
        } else {
            base
        }
    }

    fn noise(&mut self) -> f64 {
        match &self.noise {
            Some(n) => n.sample(&mut self.rng),
            None => 0.0,
        }
    }

    fn segment(&mut self, profile: &ModeProfile, duration_s: f64, out: &mut LabeledStream) -> Result<()> {
        profile.validate()?;
        if !(duration_s.is_finite() && duration_s > 0.0) {
            return Err(Error::arg("duration must be positive"));
        }
        let frames = libm::round(duration_s * self.cfg.sample_rate_hz) as usize;
        let mut base = profile.period_s * self.cfg.sample_rate_hz;
        // exact stride lengths repeat bit-identically when jitter is off
        let nearest = libm::round(base);
        if (base - nearest).abs() < 1e-9 * base {
            base = nearest;
        }

        out.frames.reserve(frames);
        out.foot.reserve(frames);
        out.labels.reserve(frames);

        let mut start = 0.0f64;
        let mut len = self.stride_len(base);
        for n in 0..frames {
            let mut x = n as f64 - start;
            while x >= len {
                start += len;
                len = self.stride_len(base);
                x = n as f64 - start;
            }
            let u = x / len;
            let mut phase = (x + 1.0) / len;
            if phase > 1.0 {
                phase -= 1.0;
            }
            let clean = profile.angles_at(u);
            let mut angles = [0.0; CHANNELS];
            for (a, c) in angles.iter_mut().zip(clean) {
                *a = c + self.noise();
            }
            let foot = [foot_angle(u) + self.noise(), foot_angle(u - 0.5) + self.noise()];

            out.frames.push(SampleFrame::new(self.next_t, angles)?);
            out.foot.push(foot);
            out.labels.push(Label { mode: profile.mode_id.clone(), phase });
            self.next_t += 1;
        }
        Ok(())
    }
}

/// Stream of one mode for `duration_s` seconds, `round(duration_s * rate)`
/// frames starting at a heel strike. Identical inputs give bit-identical
/// output.
///
/// The label phase of a sample `x` samples into a stride of length `L` is
/// `(x + 1) / L`, wrapped into `(0, 1]`.
pub fn generate(profile: &ModeProfile, duration_s: f64, cfg: &GenConfig) -> Result<LabeledStream> {
    let mut g = Generator::new(cfg)?;
    let mut out = LabeledStream::default();
    g.segment(profile, duration_s, &mut out)?;
    Ok(out)
}

/// Concatenate per-mode segments with a continuous `t_index`. Each segment
/// starts on a fresh stride; labels switch at segment boundaries.
pub fn generate_session(
    profiles: &[ModeProfile],
    schedule: &[(&str, f64)],
    cfg: &GenConfig,
) -> Result<LabeledStream> {
    if schedule.is_empty() {
        return Err(Error::arg("empty session schedule"));
    }
    let resolved = schedule
        .iter()
        .map(|(id, d)| {
            find_profile(profiles, id)
                .map(|p| (p, *d))
                .ok_or_else(|| Error::arg(alloc::format!("unknown mode {id:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut g = Generator::new(cfg)?;
    let mut out = LabeledStream::default();
    for (p, d) in resolved {
        g.segment(p, d, &mut out)?;
    }
    Ok(out)
}
