#pragma once

#include "rkcert/adversary.hpp"
#include "rkcert/error.hpp"
#include "rkcert/ff.hpp"
#include "rkcert/la.hpp"
#include "rkcert/meter.hpp"
#include "rkcert/oracle.hpp"
#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/channel.hpp"
#include "rkcert/proto/crp.hpp"
#include "rkcert/proto/fiat_shamir.hpp"
#include "rkcert/proto/grp.hpp"
#include "rkcert/proto/ldup.hpp"
#include "rkcert/proto/message.hpp"
#include "rkcert/proto/noninteractive.hpp"
#include "rkcert/proto/rank.hpp"
#include "rkcert/proto/registry.hpp"
#include "rkcert/proto/rpm.hpp"
#include "rkcert/proto/triangular.hpp"
