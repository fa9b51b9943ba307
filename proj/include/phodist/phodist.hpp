#pragma once

#include "fock.hpp"
#include "unitary.hpp"
#include "permanent.hpp"
#include "evolve.hpp"
#include "patterns.hpp"
#include "orbits.hpp"
#include "closed_form.hpp"
#include "distill.hpp"
#include "loss.hpp"
#include "haar.hpp"
