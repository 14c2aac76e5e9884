#pragma once

#include "hafvf/adafvf.hpp"
#include "hafvf/beta_params.hpp"
#include "hafvf/errors.hpp"
#include "hafvf/families/bernoulli_beta.hpp"
#include "hafvf/families/gaussian_nig.hpp"
#include "hafvf/families/gaussian_niw.hpp"
#include "hafvf/families/linreg_nig.hpp"
#include "hafvf/families/nig_vector.hpp"
#include "hafvf/family.hpp"
#include "hafvf/filter.hpp"
#include "hafvf/forgetting.hpp"
#include "hafvf/io/config_file.hpp"
#include "hafvf/io/stream_io.hpp"
#include "hafvf/models/ar.hpp"
#include "hafvf/models/synthetic.hpp"
#include "hafvf/models/tracker.hpp"
#include "hafvf/natural_params.hpp"
#include "hafvf/rng.hpp"
#include "hafvf/special_functions.hpp"
