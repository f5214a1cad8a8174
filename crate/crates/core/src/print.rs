//! Printer producing text that [`crate::parser`] reads back (up to
//! α-equivalence).

use crate::syntax::Expr;

const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(e, IMP, &mut s);
    s
}

fn write_args(args: &[Expr], out: &mut String) {
    if args.is_empty() {
        return;
    }
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(a, IMP, out);
    }
    out.push(')');
}

/// `ctx` is the binding strength of the surrounding position.
fn write_expr(e: &Expr, ctx: u8, out: &mut String) {
    match e {
        Expr::Free(n) | Expr::Bound(n) => out.push_str(n),
        Expr::Func(f, args) | Expr::Pred(f, args) => {
            out.push_str(f);
            write_args(args, out);
        }
        Expr::Eps(x, b) => {
            out.push_str("eps ");
            out.push_str(x);
            out.push_str(". ");
            write_expr(b, IMP, out);
        }
        Expr::Forall(x, b) | Expr::Exists(x, b) => {
            // a binder's body extends maximally to the right, so it needs
            // parentheses whenever anything could follow it
            let paren = ctx > IMP;
            if paren {
                out.push('(');
            }
            out.push_str(if matches!(e, Expr::Forall(..)) { "forall " } else { "exists " });
            out.push_str(x);
            out.push_str(". ");
            write_expr(b, IMP, out);
            if paren {
                out.push(')');
            }
        }
        Expr::Not(a) => {
            out.push('~');
            write_expr(a, UNARY + 1, out);
        }
        Expr::And(a, b) | Expr::Or(a, b) | Expr::Imp(a, b) => {
            let (prec, op, lctx, rctx) = match e {
                Expr::And(..) => (AND, " & ", AND, AND + 1),
                Expr::Or(..) => (OR, " | ", OR, OR + 1),
                _ => (IMP, " -> ", IMP + 1, IMP),
            };
            let paren = ctx > prec;
            if paren {
                out.push('(');
            }
            write_expr(a, lctx.max(if is_binder(a) { UNARY + 1 } else { 0 }), out);
            out.push_str(op);
            // a trailing binder may stay unparenthesized only at the very end
            // of the enclosing text, which we cannot know here
            write_expr(b, if is_binder(b) { UNARY + 1 } else { rctx }, out);
            if paren {
                out.push(')');
            }
        }
    }
}

fn is_binder(e: &Expr) -> bool {
    matches!(e, Expr::Forall(..) | Expr::Exists(..))
}
