#pragma once

#include "potlab/content.hpp"
#include "potlab/error.hpp"
#include "potlab/generators.hpp"
#include "potlab/geometry.hpp"
#include "potlab/green.hpp"
#include "potlab/harmonic.hpp"
#include "potlab/io.hpp"
#include "potlab/jones_wolff.hpp"
#include "potlab/parallel.hpp"
#include "potlab/potential.hpp"
#include "potlab/svg.hpp"
#include "potlab/verify.hpp"
