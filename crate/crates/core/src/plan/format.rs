use alloc::string::String;
use core::fmt::Write;

use super::ast::*;
use super::parser::is_identifier;

/// Renders a program in canonical layout. `parse(&format(p))` reproduces
/// `p` for any program whose names are valid identifiers and whose reals
/// are finite.
pub fn format(program: &PlanProgram) -> String {
    let mut out = String::new();
    write_block(&mut out, &program.statements, 0);
    out
}

pub fn format_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_block(out: &mut String, stmts: &[StmtNode], depth: usize) {
    for s in stmts {
        for _ in 0..depth {
            out.push_str("    ");
        }
        match &s.node {
            Statement::Let { name, value } => {
                let _ = write!(out, "let {} = ", name.node);
                write_expr(out, &value.node);
            }
            Statement::ForEach { var, iter, body } => {
                let _ = write!(out, "for {} in ", var.node);
                write_expr(out, &iter.node);
                out.push_str(" {\n");
                write_block(out, body, depth + 1);
                for _ in 0..depth {
                    out.push_str("    ");
                }
                out.push('}');
            }
            Statement::Comment(text) if text.is_empty() => out.push('#'),
            Statement::Comment(text) => {
                out.push_str("# ");
                out.push_str(text);
            }
            Statement::Emit { binding, call } => {
                out.push_str("emit ");
                if let Some(b) = binding {
                    let _ = write!(out, "{} = ", b.node);
                }
                write_expr(out, &call.node);
            }
        }
        out.push('\n');
    }
}

fn write_key(out: &mut String, key: &str) {
    if is_identifier(key) {
        out.push_str(key);
    } else {
        write_string(out, key);
    }
}

pub(crate) fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Text(s) => write_string(out, s),
        Expr::Integer(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Real(v) => {
            let _ = write!(out, "{v:?}");
        }
        Expr::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, &item.node);
            }
            out.push(']');
        }
        Expr::Record(fields) => {
            out.push('{');
            for (i, (k, v)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_key(out, &k.node);
                out.push_str(": ");
                write_expr(out, &v.node);
            }
            out.push('}');
        }
        Expr::Var(name) => out.push_str(name),
        Expr::Field(base, key) => {
            write_expr(out, &base.node);
            out.push('.');
            write_key(out, &key.node);
        }
        Expr::Call(call) => {
            out.push_str(&call.tool.node);
            out.push('(');
            for (i, (k, v)) in call.args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}=", k.node);
                write_expr(out, &v.node);
            }
            out.push(')');
        }
    }
}
