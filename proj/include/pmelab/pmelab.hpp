#pragma once

#include "pmelab/params.hpp"
#include "pmelab/field.hpp"
#include "pmelab/quadrature.hpp"
#include "pmelab/spline.hpp"
#include "pmelab/polynomial.hpp"
#include "pmelab/profile.hpp"
#include "pmelab/hypergeo.hpp"
#include "pmelab/harmonics.hpp"
#include "pmelab/spectrum.hpp"
#include "pmelab/fem.hpp"
#include "pmelab/eigensolver.hpp"
#include "pmelab/elliptic.hpp"
#include "pmelab/simulator.hpp"
#include "pmelab/io.hpp"
