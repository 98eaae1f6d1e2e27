#pragma once

#include "ovh/linalg.hpp"
#include "ovh/network.hpp"
#include "ovh/train.hpp"
#include "ovh/lp.hpp"
#include "ovh/polyhedra.hpp"
#include "ovh/union_find.hpp"
#include "ovh/overlap.hpp"
#include "ovh/rankdecomp.hpp"
#include "ovh/homology.hpp"
#include "ovh/datasets.hpp"
#include "ovh/io.hpp"
#include "ovh/experiments.hpp"
