//! Reading `(get-model)` output.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' | ')' => {
                out.push(c.to_string());
                chars.next();
            }
            '|' => {
                chars.next();
                let mut s = String::new();
                for d in chars.by_ref() {
                    if d == '|' {
                        break;
                    }
                    s.push(d);
                }
                out.push(s);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                out.push(s);
            }
        }
    }
    out
}

fn parse_all(tokens: &[String]) -> Vec<Sexp> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for t in tokens {
        match t.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                if stack.len() > 1 {
                    let done = stack.pop().expect("nonempty");
                    stack.last_mut().expect("root").push(Sexp::List(done));
                }
            }
            _ => stack.last_mut().expect("root").push(Sexp::Atom(t.clone())),
        }
    }
    while stack.len() > 1 {
        let done = stack.pop().expect("nonempty");
        stack.last_mut().expect("root").push(Sexp::List(done));
    }
    stack.pop().unwrap_or_default()
}

fn render(value: &Sexp) -> String {
    match value {
        Sexp::Atom(a) => a.strip_suffix(".0").unwrap_or(a).to_string(),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(op), x] if op == "-" => format!("-{}", render(x)),
            [Sexp::Atom(op), a, b] if op == "/" => format!("{}/{}", render(a), render(b)),
            _ => format!("({})", items.iter().map(render).collect::<Vec<_>>().join(" ")),
        },
    }
}

fn collect(sexp: &Sexp, out: &mut BTreeMap<String, String>) {
    if let Sexp::List(items) = sexp {
        if let [Sexp::Atom(head), Sexp::Atom(name), Sexp::List(args), _sort, value] = items.as_slice() {
            if head == "define-fun" && args.is_empty() {
                out.insert(name.clone(), render(value));
                return;
            }
        }
        for item in items {
            collect(item, out);
        }
    }
}

/// Constant assignments from a model, values rendered as `p`, `-p`, `p/q`
/// or raw text for algebraic numbers.
pub fn parse_model(text: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for sexp in parse_all(&tokenize(text)) {
        collect(&sexp, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z3_style_model() {
        let text = "(\n  (define-fun x () Real\n    (- 1.0))\n  (define-fun |div| () Real\n    (/ 1.0 2.0))\n  (define-fun y () Real 3.0)\n)";
        let m = parse_model(text);
        assert_eq!(m["x"], "-1");
        assert_eq!(m["div"], "1/2");
        assert_eq!(m["y"], "3");
    }

    #[test]
    fn garbage_is_harmless() {
        assert!(parse_model("(error \"model is not available\")").is_empty());
        assert!(parse_model(")))((").is_empty());
    }
}
