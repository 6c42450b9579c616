//! Shared fixtures for the criterion benchmarks.

use fso_core::{ChannelDraw, Radiometry, RngStream, Scenario};

/// Reference link scenario at a moderate SNR.
pub fn scenario() -> Scenario {
    Scenario {
        radiometry: Radiometry::default().with_snr_db(45.0),
        ..Scenario::default()
    }
}

/// A fixed batch of channel draws for kernel benchmarks.
pub fn draws(n: usize) -> Vec<ChannelDraw> {
    let sampler = scenario().sampler().expect("valid scenario");
    let mut rng = RngStream::new(1, 0);
    (0..n).map(|_| sampler.draw(&mut rng)).collect()
}
