#pragma once

#include "qam/bands.hpp"
#include "qam/ensemble.hpp"
#include "qam/errors.hpp"
#include "qam/experiments.hpp"
#include "qam/fourier.hpp"
#include "qam/husimi.hpp"
#include "qam/parallel.hpp"
#include "qam/params.hpp"
#include "qam/pseudoclassical.hpp"
#include "qam/q2_closed_form.hpp"
#include "qam/random.hpp"
#include "qam/rotor.hpp"
#include "qam/spectroscopy.hpp"
#include "qam/spin_propagator.hpp"
#include "qam/spinor.hpp"
