use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A recorded draw, tagged so a replay can tell when it has diverged.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Draw {
    Normal(f64),
    Uniform(f64),
}

/// Per-path random draws, optionally recorded so a mirrored path can replay them.
///
/// A mirrored path reflects the recorded draws in order. Once it asks for a
/// different kind of draw than the one recorded at that position (the two
/// paths took different branches), it switches to fresh draws for good; each
/// draw still has the right law given the path's past.
pub struct Noise<'a> {
    rng: ChaCha8Rng,
    mode: Mode<'a>,
}

enum Mode<'a> {
    Fresh,
    Record(&'a mut Vec<Draw>),
    Mirror { tape: &'a [Draw], pos: usize },
}

impl<'a> Noise<'a> {
    pub(crate) fn recording(seed: u64, stream: u64, record: bool, tape: &'a mut Vec<Draw>) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        tape.clear();
        let mode = if record { Mode::Record(tape) } else { Mode::Fresh };
        Self { rng, mode }
    }

    pub(crate) fn mirror(rng: ChaCha8Rng, tape: &'a [Draw]) -> Self {
        Self {
            rng,
            mode: Mode::Mirror { tape, pos: 0 },
        }
    }

    pub(crate) fn into_rng(self) -> ChaCha8Rng {
        self.rng
    }

    fn replay(&mut self) -> Option<Draw> {
        if let Mode::Mirror { tape, pos } = &mut self.mode {
            if let Some(d) = tape.get(*pos) {
                *pos += 1;
                return Some(*d);
            }
            self.mode = Mode::Fresh;
        }
        None
    }

    fn record(&mut self, d: Draw) {
        if let Mode::Record(tape) = &mut self.mode {
            tape.push(d);
        }
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        match self.replay() {
            Some(Draw::Normal(v)) => return -v,
            Some(Draw::Uniform(_)) => self.mode = Mode::Fresh,
            None => {}
        }
        let v: f64 = self.rng.sample(StandardNormal);
        self.record(Draw::Normal(v));
        v
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        match self.replay() {
            Some(Draw::Uniform(v)) => return 1.0 - v,
            Some(Draw::Normal(_)) => self.mode = Mode::Fresh,
            None => {}
        }
        let v = ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        self.record(Draw::Uniform(v));
        v
    }

    /// Exponential draw with the given rate.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.uniform().ln() / rate
    }

    /// Poisson draw by sequential inversion, capped at `cap`.
    pub fn poisson_capped(&mut self, mean: f64, cap: u32) -> u32 {
        if mean <= 0.0 || cap == 0 {
            return 0;
        }
        let u = self.uniform();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0u32;
        while u > cdf && k < cap {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        k
    }

    /// Index drawn from a pmf (`pmf[k]` is the weight of `k`).
    pub fn categorical(&mut self, pmf: &[f64]) -> usize {
        let u = self.uniform();
        let mut cdf = 0.0;
        for (k, p) in pmf.iter().enumerate() {
            cdf += p;
            if u <= cdf {
                return k;
            }
        }
        pmf.len() - 1
    }
}
