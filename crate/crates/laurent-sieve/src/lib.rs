//! Function-field analogues of Diophantine approximation by primes over F_q[T].

pub mod abelian;
pub mod arith;
pub mod chars;
pub mod classray;
pub mod cyclo;
pub mod ffcore;
pub mod kengine;
pub mod kquadengine;
pub mod laurent;
pub mod lfunc;
pub mod polyring;
pub mod quadext;
