//! Minimal end-to-end run: seed an admissible graph, synthesize the
//! deadbeat gain, and watch two agents synchronize.

use modcon::{
    check_admissible, seed_admissible, simulate_lti, AgentSystem, FMatrix, FieldSpec,
};

fn main() -> Result<(), modcon::Error> {
    let f3 = FieldSpec::new(3)?;
    let e = seed_admissible(2, f3)?; // [0 1; 0 1]
    assert!(check_admissible(&e)?.admissible);

    let a = FMatrix::from_rows(&[vec![0, 1], vec![1, 0]], f3)?;
    let b = FMatrix::from_rows(&[vec![0], vec![1]], f3)?;
    let mut sys = AgentSystem::new(a, b)?;
    sys.synthesize_gain()?; // K = [1 0]

    let trace = simulate_lti(&e, &sys, &[1, 2, 2, 1], 6)?;
    println!("sync_step = {:?}", trace.sync_step);
    for (k, state) in trace.states.iter().enumerate() {
        println!("x({k}) = {state:?}");
    }
    assert_eq!(trace.sync_step, Some(2));
    Ok(())
}
