//! Parse a model, print it back in canonical form, then show what the
//! parser says about a few broken inputs.

use dglform::ir::FreeVars;
use dglform::parser::{feedback, parse_formula, print_formula};

fn main() {
    let model = "v>0 -> <x:=0; t:=0; {x'=v, t'=1 & t<=T}; ?x=d;> d=v*T";
    let f = parse_formula(model).expect("well formed");
    println!("{}", print_formula(&f));
    let vars: Vec<_> = f.free_vars().into_iter().map(|x| x.to_string()).collect();
    println!("free: {}", vars.join(" "));

    for broken in ["\u{27e8}x:=0\u{27e9} x=0", "<x:=0;> x==0", "<x := 3*;> x>0", "x>0 &", "<x:=1;> (x=1"] {
        let d = parse_formula(broken).unwrap_err();
        println!("\n{broken}\n  {:?}: {}", d[0].code, feedback(&d).replace('\n', "\n  "));
    }
}
