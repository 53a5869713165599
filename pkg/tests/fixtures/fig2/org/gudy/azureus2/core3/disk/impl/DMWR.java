package org.gudy.azureus2.core3.disk.impl;

import org.gudy.azureus2.core3.disk.DiskManagerWriteRequest;

/** Write request; also usable where a flush-aware read request is expected. */
public class DMWR implements DiskManagerWriteRequest, com.aelitis.azureus.core.diskmanager.DiskManagerReadRequest {

    private final int pieceNumber;
    private final int offset;
    private final int length;

    public DMWR(int pieceNumber, int offset, int length) {
        this.pieceNumber = pieceNumber;
        this.offset = offset;
        this.length = length;
    }

    public int getOffset() {
        return offset;
    }

    public int getPieceNumber() {
        return pieceNumber;
    }

    public int getLength() {
        return length;
    }

    public boolean isFlush() {
        return false;
    }
}
