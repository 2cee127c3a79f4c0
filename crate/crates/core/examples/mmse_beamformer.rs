//! Compares the two closed-form relay receivers on one channel and checks
//! that the lifted quadratic form reproduces the exact MSE.
//!
//! ```bash
//! cargo run --release --example mmse_beamformer
//! ```

use irspnc::beamform::{assemble_lifted_objective, beamformer, mse_exact, BeamformerKind};
use irspnc::irsopt::{lift_vector, random_phases};
use irspnc::model::{effective_channel, gen_channels, substream, SystemParams};

fn main() -> irspnc::Result<()> {
    let params = SystemParams::from_snr_db(0.0, 16)?;
    let mut rng = substream(7, &[]);
    let ch = gen_channels(&params, &mut rng);
    let v = random_phases(16, &mut rng);
    let h = effective_channel(&ch, &v)?;

    for kind in [BeamformerKind::TrueMmse, BeamformerKind::SymbolMmse] {
        let g = beamformer(kind, &h, &params)?;
        println!("{kind:>10}: MSE against D·x = {:.4}", mse_exact(&g, &h, &params));
    }

    let g = beamformer(BeamformerKind::TrueMmse, &h, &params)?;
    let obj = assemble_lifted_objective(&g, &ch, &params)?;
    let lifted = obj.value_at(&lift_vector(&v));
    println!("lifted tr(A·V) + c0 = {lifted:.12}");
    println!("exact             = {:.12}", mse_exact(&g, &h, &params));
    Ok(())
}
