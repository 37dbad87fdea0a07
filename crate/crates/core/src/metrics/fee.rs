use super::{MetricsError, Result};
use crate::timemachine::ChannelPolicy;

/// Fee in millisatoshi a channel direction charges to forward `amount_msat`:
/// `fee_base_msat + floor(amount_msat * fee_proportional_millionths / 1_000_000)`.
pub fn fee_weight(policy: &ChannelPolicy, amount_msat: u64) -> Result<u64> {
    let proportional =
        u128::from(amount_msat) * u128::from(policy.fee_proportional_millionths) / 1_000_000;
    let total = u128::from(policy.fee_base_msat) + proportional;
    u64::try_from(total).map_err(|_| MetricsError::Overflow {
        base: policy.fee_base_msat,
        ppm: policy.fee_proportional_millionths,
        amount: amount_msat,
    })
}
