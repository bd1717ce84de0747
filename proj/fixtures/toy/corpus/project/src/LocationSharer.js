"use strict";

const FRIEND_PRECISION = 2;
const PUBLIC_PRECISION = 0;

function round(value, digits) {
  const factor = Math.pow(10, digits);
  return Math.round(value * factor) / factor;
}

class LocationSharer {
  constructor(friends) {
    this.friends = new Set(friends);
  }

  sharedLocation(viewerId, lat, lon) {
    const digits = this.friends.has(viewerId) ? FRIEND_PRECISION : PUBLIC_PRECISION;
    return { lat: round(lat, digits), lon: round(lon, digits) };
  }
}

module.exports = { LocationSharer };
