//! Backward weakest preconditions for Angel (`<g>`) and Demon (`[g]`),
//! including a game where control passes to the opponent.

use dglform::parser::{parse_formula, parse_game, print_formula};
use dglform::symexec::{eliminate_modalities, wp_box, wp_diamond};

fn main() {
    let cases = [
        ("?t=2*th; ?x=2*dh;", "dvavg=x"),
        ("x := x + 1; ++ x := x - 1;", "x = 0"),
        ("{x := x + 1; ++ x := x - 1;}^@", "x = 0"),
        ("t := 0; {x' = v, t' = 1};", "x >= 10"),
    ];
    for (game, post) in cases {
        let g = parse_game(game).unwrap();
        let p = parse_formula(post).unwrap();
        println!("game  {game}\npost  {post}");
        println!("  <.> {}", print_formula(&wp_diamond(&g, &p).unwrap()));
        println!("  [.] {}\n", print_formula(&wp_box(&g, &p).unwrap()));
    }

    let nested = parse_formula("v > 0 -> [t := 0; {x' = v, t' = 1 & t <= 1}] x >= 0").unwrap();
    println!("{}", print_formula(&eliminate_modalities(&nested).unwrap()));
    match wp_diamond(&parse_game("{x := x + 1;}*").unwrap(), &parse_formula("x > 5").unwrap()) {
        Ok(f) => println!("{}", print_formula(&f)),
        Err(e) => println!("loop: {e}"),
    }
}
