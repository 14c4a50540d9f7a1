//! Random linear network coding (RLNC) over small binary extension fields.
//!
//! * [`field`]: GF(2), GF(4), GF(16), GF(256) arithmetic.
//! * [`codec`]: generation splitting, standard/systematic/sparse/tunable
//!   encoders, on-line Gaussian-elimination decoder, wire format.
//! * [`uep`]: unequal error protection with non-overlapping (NOW) and
//!   expanding (EW) windows.
//! * [`analytics`]: closed-form decoding/outage probabilities and Monte-Carlo
//!   estimators.
//! * [`channel`]: seeded packet-erasure multicast sessions.
//! * [`grap`]: per-layer MCS and packet-count allocation for layered multicast.
//! * [`dupsim`]: coded duplication over two parallel erasure legs.
//! * [`cli`]: the `rlnc` command-line driver.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod codec;
pub mod field;
pub mod seed;
pub mod uep;
pub mod analytics;
pub mod channel;
pub mod grap;
pub mod dupsim;
pub mod cli;
