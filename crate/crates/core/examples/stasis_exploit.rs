//! A model that writes nothing puts the answer in its goal. The stasis check
//! counts written variables and turns it away before any solver call.

use dglform::analysis::{split_assumptions, stasis_check};
use dglform::parser::parse_formula;

fn main() {
    let models = [
        "<?true;> vavg = 2*v0*(v1+v2)/(2*v0+v1+v2)",
        "<x := 0; ?x = 0;> d = v*T",
        "<x := 0; t := 0; {x' = v, t' = 1}; ?t = T;> d = x",
    ];
    for src in models {
        let split = split_assumptions(&parse_formula(src).unwrap()).unwrap();
        match stasis_check(&split.game, 2) {
            Ok(w) => {
                let names: Vec<_> = w.iter().map(|x| x.to_string()).collect();
                println!("ok      {src}  writes {}", names.join(", "));
            }
            Err(e) => println!("stasis  {src}  {e}"),
        }
    }
}
