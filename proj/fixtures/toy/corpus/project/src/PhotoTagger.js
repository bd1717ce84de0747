"use strict";

class PhotoTagger {
  constructor(consenting) {
    this.consenting = new Set(consenting);
  }

  tag(photo, userId) {
    if (!this.consenting.has(userId)) {
      return false;
    }
    photo.tags.push(userId);
    return true;
  }
}

module.exports = { PhotoTagger };
