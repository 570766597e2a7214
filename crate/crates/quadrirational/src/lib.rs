//! Exact-arithmetic toolkit for quadrirational maps on CP1 x CP1: bi-Möbius
//! maps, their singularity data and classification, Yang-Baxter and 3D
//! consistency checks, Lax matrices, conic-pencil geometry, and blow-up/down.

pub mod exactnum;
pub mod projline;
pub mod bimoebius;
pub mod consistency;
pub mod catalog;
pub mod singularity;
pub mod lax;
pub mod geometry;
pub mod blow;
