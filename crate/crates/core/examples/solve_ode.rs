//! Closed-form solutions of acyclic polynomial ODE systems.

use dglform::parser::{parse_game, print_term};
use dglform::ir::Game;
use dglform::symexec::solve_ode;

fn show(src: &str) {
    let Ok(Game::Ode(system, _)) = parse_game(src) else { panic!("not an ODE: {src}") };
    println!("{src}");
    match solve_ode(&system) {
        Ok(sol) => {
            for (x, t) in &sol.solutions {
                println!("  {x}({}) = {}", sol.duration, print_term(t));
            }
        }
        Err(e) => println!("  tool failure: {e}"),
    }
}

fn main() {
    show("{x' = v, v' = a}");
    show("{x' = v, v' = -g, t' = 1 & v >= 0}");
    show("{p' = q^2, q' = 3}");
    // y' depends on y itself.
    show("{y' = y}");
    show("{y' = 1/(2*y)}");
}
