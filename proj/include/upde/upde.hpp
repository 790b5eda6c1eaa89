#pragma once

// Spectral solver and regularization toolkit for the final-value
// ultraparabolic problem u_t + u_s - u_xx = f on [0, pi] with Dirichlet
// walls and data prescribed at the terminal times.

#include "upde/experiments.hpp"
#include "upde/numerics.hpp"
#include "upde/problem.hpp"
#include "upde/quadrature.hpp"
#include "upde/regularizer.hpp"
#include "upde/sine_basis.hpp"
#include "upde/solver.hpp"
#include "upde/time_profile.hpp"
