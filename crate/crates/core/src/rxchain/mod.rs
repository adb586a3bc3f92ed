//! Receiver: frame sync, CP-based CFO correction, pilot LS channel
//! estimation, zero-forcing SC-FDE and hard QPSK decisions.

mod cfo;
mod demod;
mod equalize;
mod receiver;
mod sync;

pub use cfo::{correct_cfo, estimate_cfo_cp};
pub use demod::{decide, demodulate};
pub use equalize::{ls_channel_estimate, refine_channel_estimate, zf_equalize, ChannelEstimate, RefinedEstimate};
pub use receiver::{measure_snr, receive_frame, Receiver, RxConfig, RxDiagnostics};
pub use sync::{frame_sync, sync_metrics, SyncResult, DEFAULT_SYNC_THRESHOLD};
