//! Height-function flattening and the transformed interface conditions.
//!
//! cargo run --example flattening_transform

use pathline::verify::{check_flat_tangential, check_flat_transmission, FlatteningTransform, HeightFunction, PhaseFields};
use pathline::{scalar_fn, vector, vector_fn};

fn main() -> pathline::Result<()> {
    let flat = FlatteningTransform::new(2, HeightFunction::sine(1, 0.1), 0.5, 3.0)?;
    let y = vector(&[0.7, 0.2]);
    println!("H({:?}) = {:?}", y.as_slice(), flat.map(&y).as_slice());
    println!("H'(y) =\n{}", flat.jacobian(&y));
    println!("transpose identity residual at x' = 0.7: {:.2e}", flat.transpose_identity_residual(&vector(&[0.7])));

    // Flat fields with normal relative velocity and matching mass flux.
    let valid = PhaseFields {
        v_plus: vector_fn(|_, y| vector(&[0.0, 0.5 + 0.2 * y[1]])),
        v_minus: vector_fn(|_, y| vector(&[0.0, 1.0 - 0.3 * y[1]])),
        rho_plus: scalar_fn(|_, _| 2.0),
        rho_minus: scalar_fn(|_, _| 1.0),
    };
    let grid = flat.interface_grid(64);
    let phys = valid.push_forward(&flat);
    println!(
        "pushed forward: transmission {:.2e}, tangential {:.2e}",
        check_flat_transmission(&phys, &flat, 0.0, &grid)?,
        check_flat_tangential(&phys, &flat, 0.0, &grid)?
    );
    let defect = PhaseFields { rho_plus: scalar_fn(|_, _| 2.2), ..valid };
    println!(
        "density defect: transmission {:.3e}",
        check_flat_transmission(&defect.push_forward(&flat), &flat, 0.0, &grid)?
    );
    Ok(())
}
