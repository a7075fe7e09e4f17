//! A small interpreter for the subset, used to check that rewrites keep
//! meaning.

use std::collections::HashMap;

use stepwise_core::syntax::{AssignOp, BinaryOp, Block, Expr, ExprKind, FunctionDecl, Stmt, StmtKind, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(String),
    Range(i64, i64),
    Unit,
}

pub type Env = HashMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    Unbound(String),
    Type(String),
    Unsupported(String),
    DivideByZero,
}

fn int(v: &Value) -> Result<i64, EvalError> {
    match v {
        Value::Int(i) => Ok(*i),
        other => Err(EvalError::Type(format!("expected Int, got {other:?}"))),
    }
}

fn boolean(v: &Value) -> Result<bool, EvalError> {
    match v {
        Value::Bool(b) => Ok(*b),
        other => Err(EvalError::Type(format!("expected Boolean, got {other:?}"))),
    }
}

pub fn eval_expr(e: &Expr, env: &Env) -> Result<Value, EvalError> {
    Ok(match &e.kind {
        ExprKind::Int(i) => Value::Int(*i),
        ExprKind::Bool(b) => Value::Bool(*b),
        ExprKind::Str(s) => Value::Str(s.clone()),
        ExprKind::Name(n) => env.get(n).cloned().ok_or_else(|| EvalError::Unbound(n.clone()))?,
        ExprKind::Unary { op, operand } => {
            let v = eval_expr(operand, env)?;
            match op {
                UnaryOp::Not => Value::Bool(!boolean(&v)?),
                UnaryOp::Neg => Value::Int(-int(&v)?),
            }
        }
        ExprKind::Binary { op: BinaryOp::And, lhs, rhs } => {
            Value::Bool(boolean(&eval_expr(lhs, env)?)? && boolean(&eval_expr(rhs, env)?)?)
        }
        ExprKind::Binary { op: BinaryOp::Or, lhs, rhs } => {
            Value::Bool(boolean(&eval_expr(lhs, env)?)? || boolean(&eval_expr(rhs, env)?)?)
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let (l, r) = (eval_expr(lhs, env)?, eval_expr(rhs, env)?);
            match op {
                BinaryOp::Eq => Value::Bool(l == r),
                BinaryOp::Ne => Value::Bool(l != r),
                BinaryOp::Lt => Value::Bool(int(&l)? < int(&r)?),
                BinaryOp::Le => Value::Bool(int(&l)? <= int(&r)?),
                BinaryOp::Gt => Value::Bool(int(&l)? > int(&r)?),
                BinaryOp::Ge => Value::Bool(int(&l)? >= int(&r)?),
                BinaryOp::Range => Value::Range(int(&l)?, int(&r)?),
                BinaryOp::In | BinaryOp::NotIn => {
                    let Value::Range(lo, hi) = r else { return Err(EvalError::Type("expected a range".into())) };
                    let x = int(&l)?;
                    Value::Bool((lo <= x && x <= hi) == (*op == BinaryOp::In))
                }
                BinaryOp::Add => match (l, r) {
                    (Value::Str(a), b) => Value::Str(format!("{a}{}", show(&b))),
                    (a, b) => Value::Int(int(&a)? + int(&b)?),
                },
                BinaryOp::Sub => Value::Int(int(&l)? - int(&r)?),
                BinaryOp::Mul => Value::Int(int(&l)? * int(&r)?),
                BinaryOp::Div | BinaryOp::Rem => {
                    let d = int(&r)?;
                    if d == 0 {
                        return Err(EvalError::DivideByZero);
                    }
                    Value::Int(if *op == BinaryOp::Div { int(&l)? / d } else { int(&l)? % d })
                }
                BinaryOp::And | BinaryOp::Or => unreachable!(),
            }
        }
        ExprKind::Call { .. } | ExprKind::Member { .. } => {
            return Err(EvalError::Unsupported(stepwise_core::syntax::print_expr(e)))
        }
    })
}

fn show(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => s.clone(),
        Value::Range(a, b) => format!("{a}..{b}"),
        Value::Unit => "kotlin.Unit".into(),
    }
}

/// Result of running a function body: printed lines and the returned
/// value, if any.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub output: Vec<String>,
    pub returned: Option<Value>,
}

enum Flow {
    Next,
    Return(Option<Value>),
}

const MAX_STEPS: usize = 10_000;

struct Machine {
    env: Env,
    trace: Trace,
    steps: usize,
}

impl Machine {
    fn block(&mut self, b: &Block) -> Result<Flow, EvalError> {
        for s in &b.stmts {
            if let Flow::Return(v) = self.stmt(s)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Next)
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > MAX_STEPS {
            return Err(EvalError::Unsupported("step limit".into()));
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Flow, EvalError> {
        self.tick()?;
        match &s.kind {
            StmtKind::VarDecl { name, init, .. } => {
                let v = eval_expr(init, &self.env)?;
                self.env.insert(name.clone(), v);
            }
            StmtKind::Assign { target, op, value } => {
                let v = eval_expr(value, &self.env)?;
                let v = match op {
                    AssignOp::Assign => v,
                    _ => {
                        let cur = int(self.env.get(target).ok_or_else(|| EvalError::Unbound(target.clone()))?)?;
                        let r = int(&v)?;
                        Value::Int(match op {
                            AssignOp::Add => cur + r,
                            AssignOp::Sub => cur - r,
                            AssignOp::Mul => cur * r,
                            AssignOp::Div | AssignOp::Rem if r == 0 => return Err(EvalError::DivideByZero),
                            AssignOp::Div => cur / r,
                            AssignOp::Rem => cur % r,
                            AssignOp::Assign => unreachable!(),
                        })
                    }
                };
                self.env.insert(target.clone(), v);
            }
            StmtKind::Expr(e) => match &e.kind {
                ExprKind::Call { receiver: None, name, args } if name == "println" => {
                    let line = match args.as_slice() {
                        [] => String::new(),
                        [a] => show(&eval_expr(a, &self.env)?),
                        _ => return Err(EvalError::Unsupported("println arity".into())),
                    };
                    self.trace.output.push(line);
                }
                _ => {
                    eval_expr(e, &self.env)?;
                }
            },
            StmtKind::Return(v) => {
                let v = v.as_ref().map(|e| eval_expr(e, &self.env)).transpose()?;
                return Ok(Flow::Return(v));
            }
            StmtKind::If { cond, then_block, else_block, .. } => {
                if boolean(&eval_expr(cond, &self.env)?)? {
                    return self.block(then_block);
                } else if let Some(b) = else_block {
                    return self.block(b);
                }
            }
            StmtKind::When { subject, branches, .. } => {
                let subject = subject.as_ref().map(|e| eval_expr(e, &self.env)).transpose()?;
                for b in branches {
                    let mut hit = b.is_else();
                    for c in &b.conditions {
                        let v = eval_expr(c, &self.env)?;
                        hit |= match &subject {
                            Some(s) => &v == s,
                            None => boolean(&v)?,
                        };
                    }
                    if hit {
                        return self.block(&b.body);
                    }
                }
            }
            StmtKind::While { cond, body, .. } => {
                while boolean(&eval_expr(cond, &self.env)?)? {
                    self.tick()?;
                    if let Flow::Return(v) = self.block(body)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            StmtKind::DoWhile { body, cond, .. } => loop {
                self.tick()?;
                if let Flow::Return(v) = self.block(body)? {
                    return Ok(Flow::Return(v));
                }
                if !boolean(&eval_expr(cond, &self.env)?)? {
                    break;
                }
            },
            StmtKind::For { var, iterable, body, .. } => {
                let Value::Range(lo, hi) = eval_expr(iterable, &self.env)? else {
                    return Err(EvalError::Type("for needs a range".into()));
                };
                for i in lo..=hi {
                    self.env.insert(var.clone(), Value::Int(i));
                    if let Flow::Return(v) = self.block(body)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            StmtKind::Block(b) => return self.block(b),
        }
        Ok(Flow::Next)
    }
}

pub fn run_block(b: &Block, env: Env) -> Result<Trace, EvalError> {
    let mut m = Machine { env, trace: Trace::default(), steps: 0 };
    if let Flow::Return(v) = m.block(b)? {
        m.trace.returned = v;
    }
    Ok(m.trace)
}

/// Runs `f` with its parameters bound from `args` in order.
pub fn run_function(f: &FunctionDecl, args: &[Value]) -> Result<Trace, EvalError> {
    let env = f.params.iter().map(|p| p.name.clone()).zip(args.iter().cloned()).collect();
    run_block(&f.body, env)
}

/// Every assignment of the given names to values from their domains.
pub fn grid(domains: &[(&str, Vec<Value>)]) -> Vec<Env> {
    let mut out = vec![Env::new()];
    for (name, values) in domains {
        let mut next = Vec::new();
        for env in &out {
            for v in values {
                let mut e = env.clone();
                e.insert(name.to_string(), v.clone());
                next.push(e);
            }
        }
        out = next;
    }
    out
}

pub fn ints(range: std::ops::RangeInclusive<i64>) -> Vec<Value> {
    range.map(Value::Int).collect()
}

pub fn bools() -> Vec<Value> {
    vec![Value::Bool(false), Value::Bool(true)]
}
