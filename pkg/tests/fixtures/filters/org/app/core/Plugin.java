package org.app.core;

/** Declared for third parties; nothing in this tree implements it. */
public interface Plugin {

    void load();

    int status();
}
