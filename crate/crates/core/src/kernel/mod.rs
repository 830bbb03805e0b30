//! Symbolic kernel: atoms, the canonical normal form, expression trees.

pub mod atom;
pub mod expr;
pub mod poly;

pub use atom::{Atom, Dep, FuncAtom, IndVar, JetVar, Param, JET_ORDER_CAP, RESERVED_NAMES};
pub use expr::{evaluate, ExactValue, Expr, Truth};
pub use poly::{Monomial, Poly, RatFunc, Q};
pub mod parse;
pub mod value;

pub use parse::{parse, Parser};
pub use value::ParameterBinding;
