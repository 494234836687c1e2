#ifndef RVLAB_RVLAB_HPP
#define RVLAB_RVLAB_HPP

#include "rvlab/asymptotics.hpp"
#include "rvlab/catalog.hpp"
#include "rvlab/errors.hpp"
#include "rvlab/moments.hpp"
#include "rvlab/quadrature.hpp"
#include "rvlab/report_json.hpp"
#include "rvlab/tail_model.hpp"
#include "rvlab/theorem_verifier.hpp"

#endif  // RVLAB_RVLAB_HPP
