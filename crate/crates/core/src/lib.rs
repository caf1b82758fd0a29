//! Structure learning for Bayesian networks over continuous and mixed
//! variables, scoring each family by a Gaussian process marginal likelihood
//! (with linear-Gaussian, kernel-density and Dirichlet-multinomial
//! alternatives) and searching DAG space by greedy hill climbing.

pub mod data;
pub mod gp;
pub mod optimize;
pub mod scoring;
pub mod search;
