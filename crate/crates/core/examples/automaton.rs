//! Build a register automaton by hand, run it, check determinism and
//! round-trip it through JSON.
//!
//! `cargo run --example automaton`

use regrobust::automata::{check_determinism, complement, run, Assignment, Atom, CmpOp, Dra, Guard, Operand, Transition};
use regrobust::rational::ints;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use Operand::{Curr, Reg};
    // Strictly increasing sequences: r1 holds the previous letter.
    let first = Transition::new(0, Guard::top(), Assignment::single(0, Curr), 1);
    let up = Transition::new(
        1,
        Guard::new(vec![Atom::new(Reg(0), CmpOp::Lt, Curr)]),
        Assignment::single(0, Curr),
        1,
    );
    let dra = Dra::with_accepting(2, 1, 0, &[1], vec![first, up])?;

    for seq in [ints(&[1, 4, 9]), ints(&[1, 4, 4]), ints(&[])] {
        let r = run(&dra, &seq)?;
        println!("{seq:?}: accepted={} died={}", r.accepted, r.died());
    }
    println!("determinism violations: {}", check_determinism(&dra).len());

    let text = dra.to_json();
    let back = Dra::from_json(&text)?;
    assert_eq!(back, dra);
    println!("{text}");

    let not = complement(&dra);
    println!(
        "complement accepts [1,4,4]: {}",
        not.accepts(&ints(&[1, 4, 4]))?
    );

    let overlapping = Dra::with_accepting(
        1,
        0,
        0,
        &[0],
        vec![
            Transition::new(0, Guard::new(vec![Atom::new(Curr, CmpOp::Le, Operand::Const(5.into()))]), Assignment::none(), 0),
            Transition::new(0, Guard::new(vec![Atom::new(Curr, CmpOp::Ge, Operand::Const(3.into()))]), Assignment::none(), 0),
        ],
    )?;
    for v in check_determinism(&overlapping) {
        println!(
            "state {} transitions {} and {} both fire on letter {}",
            v.state, v.first, v.second, v.letter
        );
    }
    Ok(())
}
