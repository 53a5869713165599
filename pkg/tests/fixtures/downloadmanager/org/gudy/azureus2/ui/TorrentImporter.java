package org.gudy.azureus2.ui;

import java.io.File;
import java.net.URL;

import org.gudy.azureus2.plugins.download.Download;
import org.gudy.azureus2.plugins.download.DownloadManager;
import org.gudy.azureus2.plugins.download.DownloadManagerListener;
import org.gudy.azureus2.plugins.download.DownloadManagerStats;
import org.gudy.azureus2.plugins.download.DownloadStub;
import org.gudy.azureus2.plugins.download.DownloadWillBeAddedListener;
import org.gudy.azureus2.plugins.torrent.Torrent;

public class TorrentImporter {

    private final DownloadManager dm;

    public TorrentImporter(DownloadManager dm) {
        this.dm = dm;
    }

    public void run(Torrent torrent, File torrentFile, File saveDir, URL url, byte[] hash,
                    Download existing, DownloadManagerListener listener,
                    DownloadWillBeAddedListener willBeAdded) throws Exception {
        dm.addDownload(torrent);
        dm.addDownload(torrent, torrentFile, saveDir);
        dm.addDownload(url);
        dm.addNonPersistentDownload(torrent, torrentFile, saveDir);
        dm.addExternalDownload(existing);
    }
}
