"use strict";

class ContactList {
  constructor(contacts) {
    this.contacts = contacts;
  }

  visibleTo(viewerId) {
    return this.contacts.filter((c) => !c.blocked.includes(viewerId));
  }

  count() {
    return this.contacts.length;
  }
}

module.exports = { ContactList };
